//! Exact amplitudes and outcome statistics for Fock-state sources.
//!
//! For populations `N_γ` entering the source columns of a transfer matrix
//! `u`, the amplitude to detect `m_i` particles at detector `i` is
//!
//! ```text
//! C_m = sqrt(Π_γ N_γ! / Π_i m_i!) · [Π_γ x_γ^{N_γ}] Π_i (Σ_γ u_iγ x_γ)^{m_i}
//! ```
//!
//! The bracket is a polynomial coefficient. It can be read off either by
//! expanding the product polynomial (the default, linear in the number of
//! detected particles for a fixed number of sources) or by summing over the
//! contingency tables `p_γi` with row sums `m_i` and column sums `N_γ`, each
//! weighted by `Π_i m_i!/Π_γ p_γi! · Π u_iγ^{p_γi}`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{
    binomial_f64, compositions, for_each_contingency_table, ln_factorial_table,
};
use crate::error::{Error, Result};
use crate::exact::{ExactComplex, Surd};
use crate::optics::TransferMatrix;
use crate::output::fmt_f64;
use crate::scalar::Scalar;

/// Conditioning mass below which an event counts as having no support.
pub const DEGENERATE_MASS: f64 = 1e-14;

/// Isometry tolerance required before building a distribution.
const DISTRIBUTION_ISOMETRY_TOL: f64 = 1e-10;

/// Source populations, aligned with the transfer-matrix columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub populations: Vec<u32>,
}

impl SourceSpec {
    pub fn new(populations: impl Into<Vec<u32>>) -> Self {
        Self {
            populations: populations.into(),
        }
    }

    pub fn total(&self) -> u32 {
        self.populations.iter().sum()
    }
}

/// Detector counts `(m_1, …, m_D)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(pub Vec<u32>);

impl OccupationVector {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for OccupationVector {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl<const D: usize> From<[u32; D]> for OccupationVector {
    fn from(v: [u32; D]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, m) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

/// Probability of every occupation vector with `Σ m_i = N`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    total_particles: u32,
    detectors: usize,
    support: BTreeMap<OccupationVector, f64>,
}

impl OutcomeDistribution {
    /// Build from explicit probabilities; every key must hold `total` particles.
    pub fn from_probabilities(
        detectors: usize,
        total: u32,
        support: BTreeMap<OccupationVector, f64>,
    ) -> Result<Self> {
        for m in support.keys() {
            if m.0.len() != detectors {
                return Err(Error::Dimension(format!(
                    "outcome {m} has {} entries, expected {detectors}",
                    m.0.len()
                )));
            }
            if m.total() != total {
                return Err(Error::ParticleMismatch {
                    sources: total,
                    detected: m.total(),
                });
            }
        }
        Ok(Self {
            total_particles: total,
            detectors,
            support,
        })
    }

    pub fn total_particles(&self) -> u32 {
        self.total_particles
    }

    pub fn detectors(&self) -> usize {
        self.detectors
    }

    pub fn probability(&self, m: &OccupationVector) -> f64 {
        self.support.get(m).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, f64)> {
        self.support.iter().map(|(k, &p)| (k, p))
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.support.values().sum()
    }

    /// Marginal over a subset of detectors, keyed by their counts in order.
    pub fn marginal(&self, keep: &[usize]) -> BTreeMap<Vec<u32>, f64> {
        let mut out = BTreeMap::new();
        for (m, p) in self.iter() {
            let key: Vec<u32> = keep.iter().map(|&i| m.0[i]).collect();
            *out.entry(key).or_insert(0.0) += p;
        }
        out
    }

    /// Comma-separated rows `m_1, …, m_D, probability` with a header line.
    pub fn write_csv<W: Write>(&self, out: W, labels: &[String]) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = if labels.len() == self.detectors {
            labels.to_vec()
        } else {
            (1..=self.detectors).map(|i| format!("m{i}")).collect()
        };
        header.push("probability".into());
        w.write_record(&header)?;
        for (m, p) in self.iter() {
            let mut row: Vec<String> = m.0.iter().map(u32::to_string).collect();
            row.push(fmt_f64(p));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Tree form: `{ total_particles, detectors, outcomes: [{counts, probability}] }`.
    pub fn to_tree(&self) -> serde_json::Value {
        let outcomes: Vec<serde_json::Value> = self
            .iter()
            .map(|(m, p)| serde_json::json!({ "counts": m.0, "probability": p }))
            .collect();
        serde_json::json!({
            "total_particles": self.total_particles,
            "detectors": self.detectors,
            "outcomes": outcomes,
        })
    }
}

/// Per-detector parity values and the station each detector belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityAssignment {
    eta: Vec<i8>,
    station: Vec<usize>,
    stations: usize,
}

impl ParityAssignment {
    pub fn new(eta: Vec<i8>, station: Vec<usize>) -> Result<Self> {
        if eta.len() != station.len() {
            return Err(Error::Dimension(format!(
                "{} parity values for {} detectors",
                eta.len(),
                station.len()
            )));
        }
        if let Some(bad) = eta.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::Domain(format!("parity value {bad} is not ±1")));
        }
        let stations = station.iter().max().map_or(0, |&s| s + 1);
        for s in 0..stations {
            if !station.contains(&s) {
                return Err(Error::Domain(format!("station {s} owns no detector")));
            }
        }
        Ok(Self {
            eta,
            station,
            stations,
        })
    }

    /// Consecutive detector pairs `(+1, −1)`, one pair per station.
    pub fn paired(stations: usize) -> Self {
        let eta = (0..stations).flat_map(|_| [1, -1]).collect();
        let station = (0..stations).flat_map(|s| [s, s]).collect();
        Self::new(eta, station).expect("paired assignment is valid")
    }

    pub fn eta(&self) -> &[i8] {
        &self.eta
    }

    pub fn station_of(&self, detector: usize) -> usize {
        self.station[detector]
    }

    pub fn stations(&self) -> usize {
        self.stations
    }

    pub fn detectors(&self) -> usize {
        self.eta.len()
    }

    /// `Π_i η_i^{m_i}`; an empty product is +1.
    pub fn sign(&self, m: &OccupationVector) -> f64 {
        let odd = self
            .eta
            .iter()
            .zip(&m.0)
            .filter(|(&e, &c)| e < 0 && c % 2 == 1)
            .count();
        if odd % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn station_counts(&self, m: &OccupationVector) -> Vec<u32> {
        let mut counts = vec![0u32; self.stations];
        for (i, &c) in m.0.iter().enumerate() {
            counts[self.station[i]] += c;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmplitudeStrategy {
    /// Coefficient extraction from the product polynomial.
    #[default]
    Polynomial,
    /// Direct summation over contingency tables.
    ContingencyTable,
}

fn check_dimensions(u: &TransferMatrix, s: &SourceSpec, m: &OccupationVector) -> Result<()> {
    if s.populations.len() != u.sources() {
        return Err(Error::Dimension(format!(
            "{} populations for {} source columns",
            s.populations.len(),
            u.sources()
        )));
    }
    if m.0.len() != u.detectors() {
        return Err(Error::Dimension(format!(
            "{} counts for {} detector rows",
            m.0.len(),
            u.detectors()
        )));
    }
    if m.total() != s.total() {
        return Err(Error::ParticleMismatch {
            sources: s.total(),
            detected: m.total(),
        });
    }
    Ok(())
}

/// `0.5·(Σ ln N_γ! − Σ ln m_i!)`, the log of the normalization prefactor.
fn ln_prefactor(populations: &[u32], counts: &[u32]) -> f64 {
    let max = populations.iter().chain(counts).copied().max().unwrap_or(0);
    let lf = ln_factorial_table(max);
    let num: f64 = populations.iter().map(|&n| lf[n as usize]).sum();
    let den: f64 = counts.iter().map(|&n| lf[n as usize]).sum();
    0.5 * (num - den)
}

/// Coefficient of `Π_γ x_γ^{N_γ}` in `Π_i (Σ_γ u(i,γ) x_γ)^{m_i}`.
pub fn product_coefficient<T, F>(u: F, populations: &[u32], counts: &[u32]) -> T
where
    T: Scalar,
    F: Fn(usize, usize) -> T,
{
    let g = populations.len();
    if counts.iter().sum::<u32>() != populations.iter().sum::<u32>() {
        return T::zero();
    }
    let mut strides = vec![1usize; g];
    for k in 1..g {
        strides[k] = strides[k - 1] * (populations[k - 1] as usize + 1);
    }
    let size = if g == 0 {
        1
    } else {
        strides[g - 1] * (populations[g - 1] as usize + 1)
    };
    // digits[idx * g + γ] = exponent of x_γ at flat index idx
    let mut digits = vec![0u32; size * g];
    for idx in 0..size {
        let mut rest = idx;
        for k in (0..g).rev() {
            digits[idx * g + k] = (rest / strides[k]) as u32;
            rest %= strides[k];
        }
    }
    let mut poly = vec![T::zero(); size];
    poly[0] = T::one();
    let mut next = vec![T::zero(); size];
    for (i, &m) in counts.iter().enumerate() {
        let row: Vec<T> = (0..g).map(|k| u(i, k)).collect();
        for _ in 0..m {
            next.iter_mut().for_each(|x| *x = T::zero());
            for idx in 0..size {
                if poly[idx].is_zero() {
                    continue;
                }
                for k in 0..g {
                    if digits[idx * g + k] < populations[k] {
                        let target = idx + strides[k];
                        let add = row[k].clone() * poly[idx].clone();
                        next[target] = next[target].clone() + add;
                    }
                }
            }
            std::mem::swap(&mut poly, &mut next);
        }
    }
    poly[size - 1].clone()
}

/// Amplitude by the default strategy.
pub fn amplitude(u: &TransferMatrix, s: &SourceSpec, m: &OccupationVector) -> Result<Complex64> {
    amplitude_with(u, s, m, AmplitudeStrategy::Polynomial)
}

pub fn amplitude_with(
    u: &TransferMatrix,
    s: &SourceSpec,
    m: &OccupationVector,
    strategy: AmplitudeStrategy,
) -> Result<Complex64> {
    check_dimensions(u, s, m)?;
    let pre = ln_prefactor(&s.populations, &m.0);
    let coefficient = match strategy {
        AmplitudeStrategy::Polynomial => {
            product_coefficient(|i, k| u.get(i, k), &s.populations, &m.0)
        }
        AmplitudeStrategy::ContingencyTable => table_coefficient(u, &s.populations, &m.0),
    };
    Ok(coefficient * pre.exp())
}

fn table_coefficient(u: &TransferMatrix, populations: &[u32], counts: &[u32]) -> Complex64 {
    let max = counts.iter().copied().max().unwrap_or(0);
    let lf = ln_factorial_table(max);
    let mut total = Complex64::new(0.0, 0.0);
    for_each_contingency_table(counts, populations, |table| {
        let mut ln_weight = 0.0;
        let mut term = Complex64::new(1.0, 0.0);
        for (i, row) in table.iter().enumerate() {
            ln_weight += lf[counts[i] as usize];
            for (k, &p) in row.iter().enumerate() {
                ln_weight -= lf[p as usize];
                if p > 0 {
                    term *= u.get(i, k).powu(p);
                }
            }
        }
        total += term * ln_weight.exp();
    });
    total
}

/// All compositions of `total` into `detectors` parts, lexicographic.
pub fn enumerate_outcomes(detectors: usize, total: u32) -> Vec<OccupationVector> {
    compositions(detectors, total)
        .into_iter()
        .map(OccupationVector)
        .collect()
}

/// Full outcome distribution `|C_m|²` over every composition of `N`.
pub fn distribution(u: &TransferMatrix, s: &SourceSpec) -> Result<OutcomeDistribution> {
    if s.populations.len() != u.sources() {
        return Err(Error::Dimension(format!(
            "{} populations for {} source columns",
            s.populations.len(),
            u.sources()
        )));
    }
    let deviation = u.isometry_deviation();
    if deviation > DISTRIBUTION_ISOMETRY_TOL {
        return Err(Error::NotIsometry { deviation });
    }
    let outcomes = enumerate_outcomes(u.detectors(), s.total());
    let probs: Vec<f64> = outcomes
        .par_iter()
        .map(|m| amplitude(u, s, m).map(|c| c.norm_sqr()))
        .collect::<Result<_>>()?;
    let support = outcomes.into_iter().zip(probs).collect();
    Ok(OutcomeDistribution {
        total_particles: s.total(),
        detectors: u.detectors(),
        support,
    })
}

/// Parity correlation `Σ_m Π_i η_i^{m_i} P(m) / Σ_m P(m)`, optionally
/// restricted to outcomes whose per-station totals equal `condition`.
pub fn parity_expectation(
    dist: &OutcomeDistribution,
    pa: &ParityAssignment,
    condition: Option<&[u32]>,
) -> Result<f64> {
    if pa.detectors() != dist.detectors() {
        return Err(Error::Dimension(format!(
            "parity assignment covers {} detectors, distribution has {}",
            pa.detectors(),
            dist.detectors()
        )));
    }
    if let Some(c) = condition {
        if c.len() != pa.stations() {
            return Err(Error::Dimension(format!(
                "condition lists {} stations, assignment has {}",
                c.len(),
                pa.stations()
            )));
        }
    }
    let mut mass = 0.0;
    let mut signed = 0.0;
    for (m, p) in dist.iter() {
        if let Some(c) = condition {
            if pa.station_counts(m) != c {
                continue;
            }
        }
        mass += p;
        signed += pa.sign(m) * p;
    }
    if mass <= DEGENERATE_MASS {
        return Err(Error::DegenerateCondition);
    }
    Ok(signed / mass)
}

/// Parity correlation when only `measured` of the `N` particles are recorded,
/// the recorded subset being uniform among all particles. Computed from the
/// full distribution by hypergeometric thinning of each outcome.
pub fn parity_expectation_subsampled(
    dist: &OutcomeDistribution,
    pa: &ParityAssignment,
    measured: u32,
) -> Result<f64> {
    let n = dist.total_particles();
    if measured > n {
        return Err(Error::Domain(format!(
            "cannot measure {measured} of {n} particles"
        )));
    }
    if pa.detectors() != dist.detectors() {
        return Err(Error::Dimension("parity assignment does not match".into()));
    }
    let norm = binomial_f64(n, measured);
    let mut acc = 0.0;
    for (m, p) in dist.iter() {
        // coefficient of z^measured in Π_i (1 + η_i z)^{m_i}
        let mut poly = vec![0.0f64; n as usize + 1];
        poly[0] = 1.0;
        let mut degree = 0usize;
        for (i, &c) in m.0.iter().enumerate() {
            let e = f64::from(pa.eta()[i]);
            for _ in 0..c {
                degree += 1;
                for d in (1..=degree).rev() {
                    poly[d] += e * poly[d - 1];
                }
            }
        }
        acc += p * poly[measured as usize] / norm;
    }
    Ok(acc / dist.total_probability())
}

/// `n_samples` i.i.d. outcomes drawn with a seeded ChaCha generator.
pub fn sample_outcomes(
    dist: &OutcomeDistribution,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<OccupationVector>> {
    if n_samples == 0 {
        return Ok(Vec::new());
    }
    let keys: Vec<&OccupationVector> = dist.support.keys().collect();
    let weights: Vec<f64> = dist.support.values().map(|&p| p.max(0.0)).collect();
    let index = WeightedIndex::new(&weights)
        .map_err(|e| Error::Domain(format!("cannot sample distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n_samples)
        .map(|_| keys[index.sample(&mut rng)].clone())
        .collect())
}

/// An amplitude in exact arithmetic, kept as `sqrt(ratio) · coefficient`
/// with `ratio = Π N_γ! / Π m_i!`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactAmplitude {
    pub coefficient: ExactComplex,
    pub factorial_ratio: BigRational,
}

impl ExactAmplitude {
    /// `|C|²`, exact.
    pub fn probability(&self) -> Surd {
        self.coefficient.norm_sqr() * Surd::rational(self.factorial_ratio.clone())
    }

    /// `C` itself, when `sqrt(ratio)` lies in the field.
    pub fn amplitude(&self) -> Option<ExactComplex> {
        let root = Surd::sqrt_rational(&self.factorial_ratio)?;
        Some(ExactComplex::real(root) * self.coefficient.clone())
    }

    /// `|C|`, when `|C|²` is the square of a rational.
    pub fn magnitude_rational(&self) -> Option<BigRational> {
        let p = self.probability().as_rational()?;
        Surd::sqrt_rational(&p)?.as_rational()
    }

    pub fn to_complex(&self) -> Complex64 {
        use num_traits::ToPrimitive;
        let r = self.factorial_ratio.to_f64().unwrap_or(f64::NAN).sqrt();
        self.coefficient.to_complex() * r
    }
}

/// Exact amplitude for a transfer matrix with entries in Q(√2, √3, i).
pub fn exact_amplitude(
    rows: &[Vec<ExactComplex>],
    s: &SourceSpec,
    m: &OccupationVector,
) -> Result<ExactAmplitude> {
    if rows.iter().any(|r| r.len() != s.populations.len()) || rows.len() != m.0.len() {
        return Err(Error::Dimension("exact matrix does not match inputs".into()));
    }
    if m.total() != s.total() {
        return Err(Error::ParticleMismatch {
            sources: s.total(),
            detected: m.total(),
        });
    }
    let coefficient = product_coefficient(|i, k| rows[i][k].clone(), &s.populations, &m.0);
    let fact = |n: u32| -> num_bigint::BigInt { (1..=n).map(num_bigint::BigInt::from).product() };
    let num: num_bigint::BigInt = s.populations.iter().map(|&n| fact(n)).product();
    let den: num_bigint::BigInt = m.0.iter().map(|&n| fact(n)).product();
    let factorial_ratio = BigRational::new(num, den);
    if factorial_ratio.is_zero() {
        return Err(Error::Domain("zero factorial ratio".into()));
    }
    Ok(ExactAmplitude {
        coefficient,
        factorial_ratio,
    })
}
