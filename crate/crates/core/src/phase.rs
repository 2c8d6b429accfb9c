//! Phase-integral representation of the two-condensate statistics.
//!
//! Writing the Kronecker deltas of the amplitude sum as phase integrals and
//! changing to relative/average phase variables reduces the probability of
//! outcome `m` on the two-source interferometer to a double integral over a
//! relative phase `λ` and a "quantum" phase `Λ`:
//!
//! ```text
//! P(m) = N_α! N_β! / (Π m_i! 2^N) · ⟨ cos((N_α − N_β) Λ) Π_i [cos Λ + η_i cos(λ − φ_i)]^{m_i} ⟩
//! ```
//!
//! with `⟨·⟩` the average over `(λ, Λ) ∈ (−π, π]²`, `η = (+1, −1, +1, −1)` and
//! `φ = (−ζ, −ζ, θ, θ)`. The integrand is a trigonometric polynomial, so the
//! periodic trapezoid rule with enough nodes is exact.
//!
//! Freezing `Λ = 0` gives the model of a pre-existing relative phase `λ`:
//! each particle independently reaches detector `i` with probability
//! `¼[1 + V η_i cos(λ − φ_i)]`, where `V = 2√(N_α N_β)/N` is the fringe
//! visibility (1 for equal populations).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial_f64, compositions, factorial_f64, ln_factorial_table};
use crate::error::{Error, Result};
use crate::fock::{OccupationVector, OutcomeDistribution, SourceSpec};
use crate::optics::AngleSettings;
use crate::optimize::nelder_mead_max;
use crate::output::fmt_f64;

/// Parity of each detector of the two-source interferometer.
pub const ETA: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

/// Normalization drift tolerated before a grid is declared too coarse.
pub const GRID_DRIFT_TOL: f64 = 1e-10;

/// Uniform periodic trapezoid grids for the two phase variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureGrid {
    /// Nodes for the relative phase λ.
    pub n_lambda: usize,
    /// Nodes for the quantum phase Λ.
    pub n_big_lambda: usize,
}

impl QuadratureGrid {
    pub fn new(n_lambda: usize, n_big_lambda: usize) -> Result<Self> {
        if n_lambda == 0 || n_big_lambda == 0 {
            return Err(Error::Domain("quadrature grid needs at least one node".into()));
        }
        Ok(Self {
            n_lambda,
            n_big_lambda,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// Default `4N + 4` nodes per variable.
    pub fn for_particles(n: u32) -> Self {
        let k = 4 * n as usize + 4;
        Self {
            n_lambda: k,
            n_big_lambda: k,
        }
    }

    /// Nodes on (−π, π].
    pub fn nodes(n: usize) -> Vec<f64> {
        let h = 2.0 * PI / n as f64;
        (1..=n).map(|k| -PI + h * k as f64).collect()
    }

    /// Trapezoid weight; the weights of one variable sum to 2π.
    pub fn weight(n: usize) -> f64 {
        2.0 * PI / n as f64
    }
}

fn detector_phases(angles: &AngleSettings) -> [f64; 4] {
    [-angles.zeta, -angles.zeta, angles.theta, angles.theta]
}

fn check_two_sources(s: &SourceSpec) -> Result<(u32, u32)> {
    match s.populations.as_slice() {
        &[a, b] => Ok((a, b)),
        other => Err(Error::Dimension(format!(
            "phase representation needs two sources, got {}",
            other.len()
        ))),
    }
}

fn check_outcome(s: &SourceSpec, m: &OccupationVector) -> Result<()> {
    if m.0.len() != 4 {
        return Err(Error::Dimension(format!("expected 4 counts, got {}", m.0.len())));
    }
    if m.total() != s.total() {
        return Err(Error::ParticleMismatch {
            sources: s.total(),
            detected: m.total(),
        });
    }
    Ok(())
}

/// Largest deviation of the grid from exact integration of the moments the
/// integrands need: the normalization `⟨cos(ΔΛ) cos^N Λ⟩` on the Λ grid and
/// `⟨cos^k λ⟩` for `k = N−1, N` on the λ grid.
pub fn grid_drift(s: &SourceSpec, grid: &QuadratureGrid) -> Result<f64> {
    let (na, nb) = check_two_sources(s)?;
    let n = na + nb;
    let delta = f64::from(na) - f64::from(nb);
    let big: f64 = QuadratureGrid::nodes(grid.n_big_lambda)
        .iter()
        .map(|&l| (delta * l).cos() * l.cos().powi(n as i32))
        .sum::<f64>()
        / grid.n_big_lambda as f64;
    // exact: ⟨cos(ΔΛ) cos^N Λ⟩ = C(N, N_α) / 2^N
    let exact_big = binomial_f64(n, na) / 2f64.powi(n as i32);
    let mut drift = (big / exact_big - 1.0).abs();
    for k in [n.saturating_sub(1), n] {
        let approx: f64 = QuadratureGrid::nodes(grid.n_lambda)
            .iter()
            .map(|&l| l.cos().powi(k as i32))
            .sum::<f64>()
            / grid.n_lambda as f64;
        let exact = if k % 2 == 0 {
            binomial_f64(k, k / 2) / 2f64.powi(k as i32)
        } else {
            0.0
        };
        drift = drift.max((approx - exact).abs());
    }
    Ok(drift)
}

fn ensure_grid(s: &SourceSpec, grid: &QuadratureGrid) -> Result<()> {
    let drift = grid_drift(s, grid)?;
    if drift > GRID_DRIFT_TOL {
        return Err(Error::GridTooCoarse {
            drift,
            tol: GRID_DRIFT_TOL,
        });
    }
    Ok(())
}

/// Grid average of `cos(ΔΛ) Π_i B_i^{m_i} / Π m_i!` with
/// `B_i = cos Λ + η_i cos(λ − φ_i)`.
fn raw_weight(delta: f64, phases: &[f64; 4], m: &[u32], grid: &QuadratureGrid) -> f64 {
    let lf = ln_factorial_table(m.iter().copied().max().unwrap_or(0));
    let inv_fact = (-m.iter().map(|&k| lf[k as usize]).sum::<f64>()).exp();
    let lambdas = QuadratureGrid::nodes(grid.n_lambda);
    let mut acc = 0.0;
    for big in QuadratureGrid::nodes(grid.n_big_lambda) {
        let c = big.cos();
        let outer = (delta * big).cos();
        let mut inner = 0.0;
        for &l in &lambdas {
            let mut prod = 1.0;
            for i in 0..4 {
                if m[i] > 0 {
                    prod *= (c + ETA[i] * (l - phases[i]).cos()).powi(m[i] as i32);
                }
            }
            inner += prod;
        }
        acc += outer * inner;
    }
    acc * inv_fact / (grid.n_lambda * grid.n_big_lambda) as f64
}

/// Quantum probability of `m` from the phase integral, normalized over all
/// outcomes. The outcome sum is evaluated in closed form by the multinomial
/// theorem (`Σ_i B_i = 4 cos Λ`).
pub fn probability_quadrature(
    s: &SourceSpec,
    angles: &AngleSettings,
    m: &OccupationVector,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let (na, nb) = check_two_sources(s)?;
    check_outcome(s, m)?;
    ensure_grid(s, grid)?;
    let n = na + nb;
    let delta = f64::from(na) - f64::from(nb);
    let w = raw_weight(delta, &detector_phases(angles), &m.0, grid);
    let z: f64 = QuadratureGrid::nodes(grid.n_big_lambda)
        .iter()
        .map(|&l| (delta * l).cos() * (4.0 * l.cos()).powi(n as i32))
        .sum::<f64>()
        / grid.n_big_lambda as f64
        / factorial_f64(n);
    Ok(w / z)
}

/// Same probability with the explicit prefactor `N_α! N_β! / 2^N` instead of
/// normalization over outcomes.
pub fn probability_quadrature_prefactor(
    s: &SourceSpec,
    angles: &AngleSettings,
    m: &OccupationVector,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let (na, nb) = check_two_sources(s)?;
    check_outcome(s, m)?;
    let delta = f64::from(na) - f64::from(nb);
    let w = raw_weight(delta, &detector_phases(angles), &m.0, grid);
    Ok(factorial_f64(na) * factorial_f64(nb) / 2f64.powi((na + nb) as i32) * w)
}

/// Every outcome's quantum probability from the phase integral, normalized
/// by the explicit sum over outcomes.
pub fn quadrature_distribution(
    s: &SourceSpec,
    angles: &AngleSettings,
    grid: &QuadratureGrid,
) -> Result<OutcomeDistribution> {
    let (na, nb) = check_two_sources(s)?;
    ensure_grid(s, grid)?;
    let n = na + nb;
    let delta = f64::from(na) - f64::from(nb);
    let phases = detector_phases(angles);
    let outcomes = compositions(4, n);
    let lf = ln_factorial_table(n);
    let inv_fact: Vec<f64> = outcomes
        .iter()
        .map(|m| (-m.iter().map(|&k| lf[k as usize]).sum::<f64>()).exp())
        .collect();
    let mut acc = vec![0.0; outcomes.len()];
    let lambdas = QuadratureGrid::nodes(grid.n_lambda);
    // powers[i][k] = B_i^k at the current node
    let mut powers = vec![vec![1.0; n as usize + 1]; 4];
    for big in QuadratureGrid::nodes(grid.n_big_lambda) {
        let c = big.cos();
        let outer = (delta * big).cos();
        for &l in &lambdas {
            for i in 0..4 {
                let b = c + ETA[i] * (l - phases[i]).cos();
                for k in 1..=n as usize {
                    powers[i][k] = powers[i][k - 1] * b;
                }
            }
            for (slot, m) in acc.iter_mut().zip(&outcomes) {
                let mut prod = outer;
                for i in 0..4 {
                    prod *= powers[i][m[i] as usize];
                }
                *slot += prod;
            }
        }
    }
    let weights: Vec<f64> = acc.iter().zip(&inv_fact).map(|(a, f)| a * f).collect();
    let total: f64 = weights.iter().sum();
    let support: BTreeMap<OccupationVector, f64> = outcomes
        .into_iter()
        .map(OccupationVector)
        .zip(weights.into_iter().map(|w| w / total))
        .collect();
    OutcomeDistribution::from_probabilities(4, n, support)
}

/// Fringe visibility of the pre-existing-phase model, `2√(N_α N_β)/N`.
pub fn classical_visibility(na: u32, nb: u32) -> f64 {
    let n = f64::from(na + nb);
    if n == 0.0 {
        0.0
    } else {
        2.0 * (f64::from(na) * f64::from(nb)).sqrt() / n
    }
}

/// Probability of `m` when the condensates carry a hidden relative phase λ,
/// uniformly distributed, and particles are detected independently.
pub fn classical_phase_probability(
    s: &SourceSpec,
    angles: &AngleSettings,
    m: &OccupationVector,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let (na, nb) = check_two_sources(s)?;
    check_outcome(s, m)?;
    ensure_grid(s, grid)?;
    let n = na + nb;
    let v = classical_visibility(na, nb);
    let phases = detector_phases(angles);
    let lf = ln_factorial_table(n);
    let multinomial = (lf[n as usize] - m.0.iter().map(|&k| lf[k as usize]).sum::<f64>()).exp();
    let nodes = QuadratureGrid::nodes(grid.n_lambda);
    let mean: f64 = nodes
        .iter()
        .map(|&l| {
            (0..4)
                .map(|i| (0.25 * (1.0 + v * ETA[i] * (l - phases[i]).cos())).powi(m.0[i] as i32))
                .product::<f64>()
        })
        .sum::<f64>()
        / nodes.len() as f64;
    Ok(multinomial * mean)
}

/// Parity correlation `⟨AB⟩` when only `measured` of the `N` particles are
/// recorded. Each unrecorded particle contributes a factor with `η_i = 0`,
/// i.e. `Σ_i B_i = 4 cos Λ`, which pins Λ near zero:
///
/// ```text
/// E_M = ⟨cos(ΔΛ) (Σ_i η_i B_i)^M (4 cos Λ)^{N−M}⟩ / ⟨cos(ΔΛ) (4 cos Λ)^N⟩
/// ```
pub fn correlation_partial(
    s: &SourceSpec,
    measured: u32,
    angles: &AngleSettings,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let (na, nb) = check_two_sources(s)?;
    let n = na + nb;
    if measured > n {
        return Err(Error::Domain(format!(
            "cannot measure {measured} of {n} particles"
        )));
    }
    ensure_grid(s, grid)?;
    let delta = f64::from(na) - f64::from(nb);
    let phases = detector_phases(angles);
    let lambdas = QuadratureGrid::nodes(grid.n_lambda);
    let unmeasured = (n - measured) as i32;
    let mut num = 0.0;
    let mut den = 0.0;
    for big in QuadratureGrid::nodes(grid.n_big_lambda) {
        let c = big.cos();
        let outer = (delta * big).cos();
        let background = (4.0 * c).powi(unmeasured);
        let mut inner = 0.0;
        for &l in &lambdas {
            let signed: f64 = (0..4)
                .map(|i| ETA[i] * (c + ETA[i] * (l - phases[i]).cos()))
                .sum();
            inner += signed.powi(measured as i32);
        }
        num += outer * background * inner / lambdas.len() as f64;
        den += outer * (4.0 * c).powi(n as i32);
    }
    Ok(num / den)
}

/// The four settings and the value of a CHSH search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSearch {
    /// `(ζ, ζ′, θ, θ′)`.
    pub angles: [f64; 4],
    pub q: f64,
}

/// `E(a,b) + E(a,b′) + E(a′,b) − E(a′,b′)`.
pub fn chsh_value<F: Fn(f64, f64) -> f64>(corr: F, angles: &[f64; 4]) -> f64 {
    let [a, a2, b, b2] = *angles;
    corr(a, b) + corr(a, b2) + corr(a2, b) - corr(a2, b2)
}

/// Maximize `|CHSH|` of the partial-measurement correlation over all four
/// shifter angles, by Nelder–Mead from a fixed set of starting points.
pub fn chsh_partial_maximum(
    s: &SourceSpec,
    measured: u32,
    grid: &QuadratureGrid,
) -> Result<ChshSearch> {
    // validate once; the objective then cannot fail
    correlation_partial(s, measured, &AngleSettings::two(0.0, 0.0), grid)?;
    let corr = |z: f64, t: f64| {
        correlation_partial(s, measured, &AngleSettings::two(z, t), grid).unwrap_or(f64::NAN)
    };
    let starts: [[f64; 4]; 6] = [
        [0.3, -0.3, 0.1, 0.6],
        [PI / 4.0, -PI / 4.0, 0.0, PI / 2.0],
        [1.0, 2.0, -0.5, 0.4],
        [-1.2, 0.7, 2.1, -2.4],
        [0.05, 0.9, -0.3, 1.7],
        [2.5, -0.4, 1.1, 0.2],
    ];
    let mut best = ChshSearch {
        angles: starts[0],
        q: f64::NEG_INFINITY,
    };
    for start in &starts {
        for sign in [1.0, -1.0] {
            let objective = |x: &[f64]| sign * chsh_value(corr, &[x[0], x[1], x[2], x[3]]);
            let (x, v) = nelder_mead_max(objective, start, 0.4, 1e-13, 4000);
            if v > best.q {
                best = ChshSearch {
                    angles: [x[0], x[1], x[2], x[3]],
                    q: v,
                };
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub outcome: OccupationVector,
    pub p_quantum: f64,
    pub p_classical: f64,
    /// `p_quantum − p_classical`.
    pub divergence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparisonReport {
    pub populations: SourceSpec,
    pub angles: AngleSettings,
    pub rows: Vec<ModelComparison>,
    /// `½ Σ |p_quantum − p_classical|`.
    pub total_variation: f64,
}

impl ModelComparisonReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut row: Vec<String> = r.outcome.0.iter().map(u32::to_string).collect();
                row.extend([
                    fmt_f64(r.p_quantum),
                    fmt_f64(r.p_classical),
                    fmt_f64(r.divergence),
                ]);
                row
            })
            .collect();
        crate::output::write_rows(
            out,
            &["m1", "m2", "m3", "m4", "p_quantum", "p_classical", "divergence"],
            &rows,
        )
    }
}

/// Quantum and pre-existing-phase predictions side by side for every outcome.
pub fn compare_models(
    s: &SourceSpec,
    angles: &AngleSettings,
    grid: &QuadratureGrid,
) -> Result<ModelComparisonReport> {
    let quantum = quadrature_distribution(s, angles, grid)?;
    let mut rows = Vec::with_capacity(quantum.len());
    let mut tv = 0.0;
    for (m, pq) in quantum.iter() {
        let pc = classical_phase_probability(s, angles, m, grid)?;
        tv += (pq - pc).abs();
        rows.push(ModelComparison {
            outcome: m.clone(),
            p_quantum: pq,
            p_classical: pc,
            divergence: pq - pc,
        });
    }
    Ok(ModelComparisonReport {
        populations: s.clone(),
        angles: *angles,
        rows,
        total_variation: 0.5 * tv,
    })
}
