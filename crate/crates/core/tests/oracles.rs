//! Frozen values checked against oracles written independently of the
//! library code paths they test.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use common::{permanent_amplitude, random_angle, rng};
use fockbell::combinatorics::composition_count;
use fockbell::fock::{enumerate_outcomes, parity_expectation_subsampled};
use fockbell::hardy::{
    build_hardy_network, central_bs_parity_distribution, certainty_check, hardy_amplitudes,
    impossibility_certificate, HardyConfig,
};
use fockbell::nonlocality::{bchsh_q, bchsh_q_gaussian, correlation_closed_form, ghz_correlation_exact};
use fockbell::optics::{three_source_ring, two_source_interferometer, two_source_network};
use fockbell::phase::{
    classical_phase_probability, compare_models, correlation_partial, probability_quadrature,
    QuadratureGrid,
};
use fockbell::{amplitude, distribution, parity_expectation, AngleSettings, OccupationVector, ParityAssignment, SourceSpec};

#[test]
fn engine_matches_permanent_oracle() {
    let mut r = rng(11);
    for pops in [[1u32, 1], [2, 1], [2, 2], [3, 2], [0, 4]] {
        let s = SourceSpec::new(pops);
        let u = two_source_interferometer(random_angle(&mut r), random_angle(&mut r));
        for m in enumerate_outcomes(4, s.total()) {
            let a = amplitude(&u, &s, &m).unwrap();
            let b = permanent_amplitude(&u, &s, &m);
            assert!((a - b).norm() < 1e-12, "{pops:?} {m}");
        }
    }
    let s = SourceSpec::new([2, 2, 2]);
    let u = three_source_ring(0.3, 1.1, -0.4);
    for m in enumerate_outcomes(6, 6) {
        let a = amplitude(&u, &s, &m).unwrap();
        assert!((a - permanent_amplitude(&u, &s, &m)).norm() < 1e-12, "{m}");
    }
}

#[test]
fn shifter_at_pi_flips_alpha_column() {
    let u = two_source_network(PI, 0.0).compose().unwrap();
    assert!((u.get(0, 0) - Complex64::new(0.0, -0.5)).norm() < 1e-15);
    assert!((u.get(1, 0) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn single_source_is_multinomial_and_angle_free() {
    for n in 1..=5u32 {
        let s = SourceSpec::new([n, 0]);
        let reference = distribution(&two_source_interferometer(0.0, 0.0), &s).unwrap();
        for (z, t) in [(0.7, -0.2), (2.5, 1.9)] {
            let d = distribution(&two_source_interferometer(z, t), &s).unwrap();
            for m in enumerate_outcomes(4, n) {
                // multinomial(N; ¼, ¼, ¼, ¼)
                let coef: f64 = (1..=n).map(f64::from).product::<f64>()
                    / m.0.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product::<f64>();
                let want = coef / 4f64.powi(n as i32);
                assert_abs_diff_eq!(d.probability(&m), want, epsilon = 1e-14);
                assert_abs_diff_eq!(d.probability(&m), reference.probability(&m), epsilon = 1e-14);
            }
        }
    }
}

#[test]
fn outcome_counts() {
    assert_eq!(composition_count(6, 9), 2002);
    assert_eq!(enumerate_outcomes(6, 9).len(), 2002);
}

#[test]
fn all_at_first_detector_equals_brute_force() {
    // (i/2)^N per term, C(N, N_α) terms with equal phase once ζ = −θ
    let grid = QuadratureGrid::for_particles(6);
    let s = SourceSpec::new([3, 3]);
    let m = OccupationVector::from([6, 0, 0, 0]);
    for zeta in [0.0, 0.9, -2.1] {
        let brute = permanent_amplitude(&two_source_interferometer(zeta, -zeta), &s, &m).norm_sqr();
        let p = probability_quadrature(&s, &AngleSettings::two(zeta, -zeta), &m, &grid).unwrap();
        assert_abs_diff_eq!(p, brute, epsilon = 1e-13);
        assert_abs_diff_eq!(p, 20.0 / 4096.0, epsilon = 1e-13);
    }
}

#[test]
fn classical_two_particle_integral() {
    // N!/Πm! · ⟨¼[1 − cos(λ+ζ)] · ¼[1 − cos(λ−θ)]⟩ = (1 + ½cos(ζ+θ))/8
    let s = SourceSpec::new([1, 1]);
    let grid = QuadratureGrid::for_particles(2);
    let m = OccupationVector::from([0, 1, 0, 1]);
    for (z, t) in [(PI, 0.0), (FRAC_PI_2, FRAC_PI_2), (0.0, 0.0), (0.3, 1.2)] {
        let c = classical_phase_probability(&s, &AngleSettings::two(z, t), &m, &grid).unwrap();
        let nodes = 10_000;
        let brute: f64 = (0..nodes)
            .map(|k| {
                let l = -PI + 2.0 * PI * (k as f64 + 0.5) / nodes as f64;
                2.0 * 0.25 * (1.0 - (l + z).cos()) * 0.25 * (1.0 - (l - t).cos())
            })
            .sum::<f64>()
            / nodes as f64;
        assert_abs_diff_eq!(c, brute, epsilon = 1e-12);
        assert_abs_diff_eq!(c, (1.0 + 0.5 * (z + t).cos()) / 8.0, epsilon = 1e-14);
    }
}

#[test]
fn sum_zero_values_are_reported_not_equal() {
    let s = SourceSpec::new([1, 1]);
    let grid = QuadratureGrid::for_particles(2);
    let report = compare_models(&s, &AngleSettings::two(0.4, -0.4), &grid).unwrap();
    let row = report.rows.iter().find(|r| r.outcome == OccupationVector::from([0, 1, 0, 1])).unwrap();
    assert_abs_diff_eq!(row.p_quantum, 0.25, epsilon = 1e-14);
    assert_abs_diff_eq!(row.p_classical, 3.0 / 16.0, epsilon = 1e-14);
    let at_pi = compare_models(&s, &AngleSettings::two(PI, 0.0), &grid).unwrap();
    let row = at_pi.rows.iter().find(|r| r.outcome == OccupationVector::from([0, 1, 0, 1])).unwrap();
    assert!(row.divergence < -0.06);
}

#[test]
fn station_totals_agree_between_models() {
    // Alice's total m₁+m₂ is Binomial(N, ½) in both models
    let grid = QuadratureGrid::for_particles(4);
    for pops in [[2u32, 2], [3, 1]] {
        let s = SourceSpec::new(pops);
        let report = compare_models(&s, &AngleSettings::two(0.8, 0.3), &grid).unwrap();
        let mut q = [0.0; 5];
        let mut c = [0.0; 5];
        for r in &report.rows {
            let k = (r.outcome.0[0] + r.outcome.0[1]) as usize;
            q[k] += r.p_quantum;
            c[k] += r.p_classical;
        }
        for k in 0..5 {
            let binom = [1.0, 4.0, 6.0, 4.0, 1.0][k] / 16.0;
            assert_abs_diff_eq!(q[k], binom, epsilon = 1e-12);
            assert_abs_diff_eq!(c[k], binom, epsilon = 1e-12);
        }
    }
}

#[test]
fn single_condensate_has_no_divergence() {
    for n in 1..=4u32 {
        let s = SourceSpec::new([n, 0]);
        let grid = QuadratureGrid::for_particles(n);
        let report = compare_models(&s, &AngleSettings::two(1.3, -0.2), &grid).unwrap();
        assert!(report.rows.iter().all(|r| r.divergence.abs() < 1e-13));
    }
}

#[test]
fn classical_model_is_a_distribution() {
    let mut r = rng(5);
    for pops in [[1u32, 2], [3, 3], [4, 1]] {
        let s = SourceSpec::new(pops);
        let grid = QuadratureGrid::for_particles(s.total());
        let a = AngleSettings::two(random_angle(&mut r), random_angle(&mut r));
        let mut total = 0.0;
        for m in enumerate_outcomes(4, s.total()) {
            let p = classical_phase_probability(&s, &a, &m, &grid).unwrap();
            assert!(p >= -1e-12);
            total += p;
        }
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }
}

#[test]
fn partial_correlation_matches_subsampling() {
    let mut r = rng(21);
    for pops in [[1u32, 1], [2, 2], [3, 3], [2, 1], [3, 1]] {
        let s = SourceSpec::new(pops);
        let n = s.total();
        let grid = QuadratureGrid::for_particles(n);
        for _ in 0..3 {
            let (z, t) = (random_angle(&mut r), random_angle(&mut r));
            let dist = distribution(&two_source_interferometer(z, t), &s).unwrap();
            for m in 0..=n {
                let thinned = parity_expectation_subsampled(&dist, &ParityAssignment::paired(2), m).unwrap();
                let quad = correlation_partial(&s, m, &AngleSettings::two(z, t), &grid).unwrap();
                assert_abs_diff_eq!(quad, thinned, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn partial_correlation_closed_form() {
    // E_M = N_α!N_β!2^N/N! · cos^M((ζ+θ)/2) ⟨cos^M λ⟩ ⟨cos^{N−M} Λ⟩ for N_α = N_β
    let s = SourceSpec::new([2, 2]);
    let grid = QuadratureGrid::for_particles(4);
    let (z, t) = (0.7, -0.1);
    let c = ((z + t) / 2.0f64).cos();
    let want = [1.0, 0.0, 2.0 / 3.0 * c * c, 0.0, c.powi(4)];
    for (m, w) in want.iter().enumerate() {
        let e = correlation_partial(&s, m as u32, &AngleSettings::two(z, t), &grid).unwrap();
        assert_abs_diff_eq!(e, *w, epsilon = 1e-12);
    }
}

#[test]
fn recorded_fraction_controls_chsh() {
    use fockbell::phase::chsh_partial_maximum;
    let s = SourceSpec::new([2, 2]);
    let grid = QuadratureGrid::for_particles(4);
    let full = chsh_partial_maximum(&s, 4, &grid).unwrap();
    assert!(full.q > 2.36, "{}", full.q);
    for m in 0..4 {
        assert!(chsh_partial_maximum(&s, m, &grid).unwrap().q <= 2.0 + 1e-6);
    }
}

#[test]
fn correlation_quarter_by_enumeration() {
    let s = SourceSpec::new([2, 2]);
    let dist = distribution(&two_source_interferometer(0.5, FRAC_PI_2 - 0.5), &s).unwrap();
    let mut signed = 0.0;
    for (m, p) in dist.iter() {
        let sign = if (m.0[1] + m.0[3]) % 2 == 0 { 1.0 } else { -1.0 };
        signed += sign * p;
    }
    assert_abs_diff_eq!(signed, 0.25, epsilon = 1e-12);
    assert_abs_diff_eq!(correlation_closed_form(2, 2, 0.5, FRAC_PI_2 - 0.5), 0.25, epsilon = 1e-15);
}

#[test]
fn bchsh_values() {
    let direct = 3.0 * (PI / 8.0).cos().powi(2) - (3.0 * PI / 8.0).cos().powi(2);
    assert_abs_diff_eq!(bchsh_q(2, PI / 8.0), direct, epsilon = 1e-15);
    assert_abs_diff_eq!(direct, 2.414, epsilon = 5e-4);
    for x in [0.3, 0.6, 1.0] {
        let n = 100_000_000u64;
        let q = bchsh_q(n, x / (n as f64).sqrt());
        assert_abs_diff_eq!(q, bchsh_q_gaussian(x), epsilon = 1e-6);
    }
}

#[test]
fn ghz_six_at_pi() {
    for split in [[PI, 0.0, 0.0], [FRAC_PI_2, FRAC_PI_2, 0.0], [0.2, 1.9, PI - 2.1]] {
        let v = ghz_correlation_exact(6, split).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }
    let s: f64 = 0.77;
    let v = ghz_correlation_exact(6, [s, 0.0, 0.0]).unwrap();
    assert_abs_diff_eq!(v, (8.0 + 2.0 * (2.0 * s).cos()) / 10.0, epsilon = 1e-12);
}

#[test]
fn hardy_reference_arithmetic() {
    let net = build_hardy_network().unwrap();
    let dd = net.matrix(HardyConfig::DD);
    let by_hand = (1.0 / 3f64.sqrt()) * FRAC_1_SQRT_2_F + Complex64::i() * (2.0f64 / 3.0).sqrt() * Complex64::new(0.0, 0.5);
    assert!(by_hand.norm() < 1e-15);
    assert!(dd.get(1, 0).norm() < 1e-15);
    let p = net.matrix(HardyConfig::DPrimeDPrime);
    assert!((p.get(1, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    assert!((p.get(2, 0) - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
}

const FRAC_1_SQRT_2_F: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[test]
fn hardy_two_particle_table_by_permanent() {
    let net = build_hardy_network().unwrap();
    let t = hardy_amplitudes(&net, 2, HardyConfig::DD).unwrap();
    assert_eq!(t.entries.len(), 10);
    let s = SourceSpec::new([1, 1]);
    let mut total = 0.0;
    for (m, c) in &t.entries {
        let brute = permanent_amplitude(net.matrix(HardyConfig::DD), &s, m);
        assert!((c - brute).norm() < 1e-14);
        total += brute.norm_sqr();
    }
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
}

#[test]
fn hardy_certainties_and_certificates() {
    let net = build_hardy_network().unwrap();
    let (a, b) = certainty_check(&net, 2).unwrap();
    assert_abs_diff_eq!(a, 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(b, 1.0, epsilon = 1e-10);
    let (a4, b4) = certainty_check(&net, 4).unwrap();
    assert!(a4.is_finite() && b4.is_finite());
    let c6 = impossibility_certificate(&net, 6).unwrap();
    assert!(c6.verdict);
    assert_abs_diff_eq!(c6.nonzero_event_probability, 1.0 / 46656.0, epsilon = 1e-18);
    assert!(impossibility_certificate(&net, 10).unwrap().verdict);
    assert!(!impossibility_certificate(&net, 4).unwrap().verdict);
}

#[test]
fn central_splitter_three_each() {
    let d = central_bs_parity_distribution(3).unwrap();
    let mut total = 0.0;
    for (m, p) in d.iter() {
        if m.0[0] % 2 == 1 {
            assert!(p < 1e-14, "{m}");
        } else {
            total += p;
        }
    }
    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
    // |⟨2k, 6−2k| ...⟩|² = C(2k,k) C(6−2k,3−k) / 2^6 from the HOM generalization
    for k in 0..=3u32 {
        let c = |n: u32, r: u32| -> f64 { (1..=r).map(|i| f64::from(n - r + i) / f64::from(i)).product() };
        let want = c(2 * k, k) * c(6 - 2 * k, 3 - k) / 64.0;
        assert_abs_diff_eq!(d.probability(&[2 * k, 6 - 2 * k].into()), want, epsilon = 1e-14);
    }
}

#[test]
fn parity_expectation_closed_form_small() {
    let mut r = rng(3);
    for _ in 0..5 {
        let (z, t) = (random_angle(&mut r), random_angle(&mut r));
        let dist = distribution(&two_source_interferometer(z, t), &SourceSpec::new([3, 2])).unwrap();
        let e = parity_expectation(&dist, &ParityAssignment::paired(2), None).unwrap();
        assert!(e.abs() < 1e-12);
    }
}
