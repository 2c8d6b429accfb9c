use std::f64::consts::FRAC_PI_2;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_big, ln_factorial_table};
use crate::error::{Error, Result};
use crate::fock::{amplitude, OccupationVector, ParityAssignment, SourceSpec, DEGENERATE_MASS};
use crate::optics::three_source_ring;

/// Tolerance for "equals ±1" in the contradiction test.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// `(σ, θ, χ)` triples of the sign argument: three products fixed to −1,
/// then the all-zero setting.
pub const CERTIFICATE_ANGLES: [[f64; 3]; 4] = [
    [FRAC_PI_2, FRAC_PI_2, 0.0],
    [FRAC_PI_2, 0.0, FRAC_PI_2],
    [0.0, FRAC_PI_2, FRAC_PI_2],
    [0.0, 0.0, 0.0],
];

const EXACT_COEFFICIENT_LIMIT: u32 = 60;
const IMAGINARY_TOL: f64 = 1e-14;

fn per_station(n: u32) -> Result<u32> {
    if n == 0 || n % 3 != 0 {
        return Err(Error::Domain(format!(
            "particle number {n} is not a positive multiple of 3"
        )));
    }
    Ok(n / 3)
}

/// One harmonic `coefficient · cos(harmonic · Σ)` of `⟨ABC⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub harmonic: u32,
    pub coefficient: f64,
    /// Reduced fraction, when the weights were summed in exact integers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

/// Weights `C(n, q)³` for `q = 0..=n`, scaled so the largest is 1 when they
/// are too big for exact integers.
enum Weights {
    Exact(Vec<BigUint>),
    Scaled(Vec<f64>),
}

fn weights(n: u32) -> Weights {
    if n <= EXACT_COEFFICIENT_LIMIT {
        Weights::Exact(
            (0..=n)
                .map(|q| {
                    let b = binomial_big(n, q);
                    &b * &b * &b
                })
                .collect(),
        )
    } else {
        let lf = ln_factorial_table(n);
        let ln_w: Vec<f64> = (0..=n)
            .map(|q| 3.0 * (lf[n as usize] - lf[q as usize] - lf[(n - q) as usize]))
            .collect();
        let top = ln_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Weights::Scaled(ln_w.iter().map(|l| (l - top).exp()).collect())
    }
}

/// Harmonic decomposition of the conditioned ring correlation, lowest
/// harmonic first. The coefficients sum to 1.
pub fn ghz_harmonics(n_particles: u32) -> Result<Vec<HarmonicTerm>> {
    let n = per_station(n_particles)?;
    let mut terms = Vec::new();
    match weights(n) {
        Weights::Exact(w) => {
            let total: BigUint = w.iter().sum();
            for k in (n % 2..=n).step_by(2) {
                // harmonic k collects q = (n − k)/2 and its mirror
                let q = ((n - k) / 2) as usize;
                let mut weight = w[q].clone();
                if k > 0 {
                    weight += &w[n as usize - q];
                }
                if weight.is_zero() {
                    continue;
                }
                let ratio = BigRational::new(weight.into(), total.clone().into());
                terms.push(HarmonicTerm {
                    harmonic: k,
                    coefficient: ratio.to_f64().unwrap_or(f64::NAN),
                    exact: Some(ratio.to_string()),
                });
            }
        }
        Weights::Scaled(w) => {
            let total: f64 = w.iter().sum();
            for k in (n % 2..=n).step_by(2) {
                let q = ((n - k) / 2) as usize;
                let mut weight = w[q];
                if k > 0 {
                    weight += w[n as usize - q];
                }
                terms.push(HarmonicTerm {
                    harmonic: k,
                    coefficient: weight / total,
                    exact: None,
                });
            }
        }
    }
    Ok(terms)
}

/// Conditioned parity product of the three-condensate ring, from the binomial
/// closed form `Σ_q C(n,q)³ e^{iΣ(n−2q)} / Σ_q C(n,q)³` with `n = N/3`.
pub fn ghz_correlation_closed_form(n_particles: u32, sigma: f64, theta: f64, chi: f64) -> Result<f64> {
    let n = per_station(n_particles)?;
    let s = sigma + theta + chi;
    let w: Vec<f64> = match weights(n) {
        Weights::Exact(w) => {
            let top = w.iter().max().cloned().unwrap_or_default();
            let top = top.to_f64().unwrap_or(1.0);
            w.iter().map(|x| x.to_f64().unwrap_or(f64::NAN) / top).collect()
        }
        Weights::Scaled(w) => w,
    };
    let total: f64 = w.iter().sum();
    let (mut re, mut im) = (0.0, 0.0);
    for (q, wq) in w.iter().enumerate() {
        let phase = s * (f64::from(n) - 2.0 * q as f64);
        re += wq * phase.cos();
        im += wq * phase.sin();
    }
    let im = im / total;
    if im.abs() >= IMAGINARY_TOL {
        return Err(Error::NonRealCorrelation(im));
    }
    Ok(re / total)
}

/// The same correlation computed from amplitudes on the ring, conditioned on
/// `N/3` detections at each station.
pub fn ghz_correlation_exact(n_particles: u32, angles: [f64; 3]) -> Result<f64> {
    let n = per_station(n_particles)?;
    let u = three_source_ring(angles[0], angles[1], angles[2]);
    let s = SourceSpec::new([n, n, n]);
    let pa = ParityAssignment::paired(3);
    let mut mass = 0.0;
    let mut signed = 0.0;
    for a in 0..=n {
        for b in 0..=n {
            for c in 0..=n {
                let m = OccupationVector(vec![a, n - a, b, n - b, c, n - c]);
                let p = amplitude(&u, &s, &m)?.norm_sqr();
                mass += p;
                signed += pa.sign(&m) * p;
            }
        }
    }
    if mass <= DEGENERATE_MASS {
        return Err(Error::DegenerateCondition);
    }
    Ok(signed / mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GhzMode {
    #[default]
    ClosedForm,
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzEvidence {
    /// `(σ, θ, χ)`.
    pub angles: [f64; 3],
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhzReport {
    pub n_particles: u32,
    pub mode: GhzMode,
    pub correlation_coefficients: Vec<HarmonicTerm>,
    pub contradiction: bool,
    pub evidence: Vec<GhzEvidence>,
    pub tolerance: f64,
}

impl GhzReport {
    /// Re-derive the verdict from the recorded evidence.
    pub fn verdict_from_evidence(&self) -> bool {
        self.evidence.len() == 4
            && self.evidence[..3]
                .iter()
                .all(|e| (e.correlation + 1.0).abs() <= self.tolerance)
            && (self.evidence[3].correlation - 1.0).abs() <= self.tolerance
    }
}

/// Evaluate the four sign-argument products and certify a contradiction with
/// local realism when the first three are −1 and the last is +1.
pub fn ghz_contradiction_certificate(n_particles: u32) -> Result<GhzReport> {
    ghz_contradiction_certificate_with(n_particles, GhzMode::ClosedForm)
}

pub fn ghz_contradiction_certificate_with(n_particles: u32, mode: GhzMode) -> Result<GhzReport> {
    let coefficients = ghz_harmonics(n_particles)?;
    let evidence = CERTIFICATE_ANGLES
        .iter()
        .map(|&[a, b, c]| {
            let correlation = match mode {
                GhzMode::ClosedForm => ghz_correlation_closed_form(n_particles, a, b, c)?,
                GhzMode::Enumeration => ghz_correlation_exact(n_particles, [a, b, c])?,
            };
            Ok(GhzEvidence {
                angles: [a, b, c],
                correlation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = GhzReport {
        n_particles,
        mode,
        correlation_coefficients: coefficients,
        contradiction: false,
        evidence,
        tolerance: CERTIFICATE_TOL,
    };
    report.contradiction = report.verdict_from_evidence();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_non_multiples() {
        assert!(matches!(ghz_correlation_closed_form(4, 0.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert!(ghz_harmonics(0).is_err());
    }

    #[test]
    fn nine_particle_coefficients_are_exact() {
        let h = ghz_harmonics(9).unwrap();
        let exact: Vec<(u32, &str)> = h.iter().map(|t| (t.harmonic, t.exact.as_deref().unwrap())).collect();
        assert_eq!(exact, vec![(1, "27/28"), (3, "1/28")]);
        let h6 = ghz_harmonics(6).unwrap();
        let exact6: Vec<(u32, &str)> = h6.iter().map(|t| (t.harmonic, t.exact.as_deref().unwrap())).collect();
        assert_eq!(exact6, vec![(0, "4/5"), (2, "1/5")]);
    }

    #[test]
    fn coefficients_sum_to_one() {
        for n in [3, 30, 180, 240] {
            let s: f64 = ghz_harmonics(n).unwrap().iter().map(|t| t.coefficient).sum();
            assert!((s - 1.0).abs() < 1e-12, "N={n}");
        }
    }

    #[test]
    fn closed_form_small_cases() {
        for k in 0..12 {
            let s = -3.0 + 0.5 * k as f64;
            let c3 = ghz_correlation_closed_form(3, s, 0.0, 0.0).unwrap();
            assert!((c3 - s.cos()).abs() < 1e-14);
            let c6 = ghz_correlation_closed_form(6, 0.0, s, 0.0).unwrap();
            assert!((c6 - (8.0 + 2.0 * (2.0 * s).cos()) / 10.0).abs() < 1e-14);
            let c9 = ghz_correlation_closed_form(9, 0.0, 0.0, s).unwrap();
            assert!((c9 - (27.0 * s.cos() + (3.0 * s).cos()) / 28.0).abs() < 1e-14);
        }
    }

    #[test]
    fn odd_harmonics_flip_sign() {
        for n in [3, 9, 15, 21, 189] {
            for k in 0..7 {
                let s = 0.37 * k as f64;
                let a = ghz_correlation_closed_form(n, s, 0.0, 0.0).unwrap();
                let b = ghz_correlation_closed_form(n, s + PI, 0.0, 0.0).unwrap();
                assert!((a + b).abs() < 1e-12, "N={n}");
            }
        }
    }

    #[test]
    fn ring_enumeration_matches_closed_form() {
        for (n, angles) in [(3, [0.3, -1.1, 0.7]), (6, [1.0, 0.4, 2.2]), (9, [PI, 0.0, 0.0])] {
            let exact = ghz_correlation_exact(n, angles).unwrap();
            let closed = ghz_correlation_closed_form(n, angles[0], angles[1], angles[2]).unwrap();
            assert!((exact - closed).abs() < 1e-10, "N={n}");
        }
    }

    #[test]
    fn certificates() {
        for (n, want) in [(3, true), (6, false), (9, true), (12, false)] {
            let r = ghz_contradiction_certificate(n).unwrap();
            assert_eq!(r.contradiction, want, "N={n}");
            assert_eq!(r.verdict_from_evidence(), want);
        }
    }
}
