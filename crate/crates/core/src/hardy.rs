//! Hardy-type impossibility on a two-source interferometer with a central
//! splitter.
//!
//! Source α splits into an outer arm `c` toward Alice and an inner arm `w`;
//! β splits into an outer arm `d` toward Bob and an inner arm `x`. The inner
//! arms meet on a central balanced splitter whose outputs `e` and `f` head to
//! Alice and Bob. Each station either detects its two arms directly (primed
//! detectors) or first mixes them on a detection splitter of transmission
//! probability 1/3 (unprimed detectors), with path phases chosen so that no
//! α particle reaches D₂ and no β particle reaches D₃.
//!
//! Mode slots are the physical arms: slot 0 is `c`, slot 1 carries `w` and
//! then `e`, slot 2 is `d`, slot 3 carries `x` and then `f`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{ExactComplex, Surd};
use crate::fock::{
    amplitude, distribution, enumerate_outcomes, exact_amplitude, ExactAmplitude, OccupationVector,
    OutcomeDistribution, SourceSpec, DEGENERATE_MASS,
};
use crate::optics::{
    balanced_splitter, beamsplitter_element, compose_network, phase_shifter, propagate,
    reduce_angle, ModeId, OpticalElement, SlotOp, TransferMatrix,
};
use crate::output::fmt_f64;

/// Magnitude below which an amplitude counts as zero.
pub const HARDY_ZERO_TOL: f64 = 1e-14;
/// Allowed distance of a conditional certainty from 1.
pub const CERTAINTY_TOL: f64 = 1e-10;

const C: usize = 0;
const E: usize = 1;
const D: usize = 2;
const F: usize = 3;

/// Which detectors each station uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum HardyConfig {
    #[serde(rename = "DD")]
    DD,
    #[serde(rename = "DD'")]
    DDPrime,
    #[serde(rename = "D'D")]
    DPrimeD,
    #[serde(rename = "D'D'")]
    DPrimeDPrime,
}

impl HardyConfig {
    pub const ALL: [HardyConfig; 4] = [
        HardyConfig::DD,
        HardyConfig::DDPrime,
        HardyConfig::DPrimeD,
        HardyConfig::DPrimeDPrime,
    ];

    pub fn alice_primed(self) -> bool {
        matches!(self, HardyConfig::DPrimeD | HardyConfig::DPrimeDPrime)
    }

    pub fn bob_primed(self) -> bool {
        matches!(self, HardyConfig::DDPrime | HardyConfig::DPrimeDPrime)
    }

    pub fn from_flags(alice_primed: bool, bob_primed: bool) -> Self {
        match (alice_primed, bob_primed) {
            (false, false) => HardyConfig::DD,
            (false, true) => HardyConfig::DDPrime,
            (true, false) => HardyConfig::DPrimeD,
            (true, true) => HardyConfig::DPrimeDPrime,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            HardyConfig::DD => "DD",
            HardyConfig::DDPrime => "DD'",
            HardyConfig::DPrimeD => "D'D",
            HardyConfig::DPrimeDPrime => "D'D'",
        }
    }

    /// Slots read by detectors 1..4 in this configuration.
    fn detector_slots(self) -> [usize; 4] {
        let alice = if self.alice_primed() { [C, E] } else { [E, C] };
        let bob = if self.bob_primed() { [F, D] } else { [D, F] };
        [alice[0], alice[1], bob[0], bob[1]]
    }

    fn detector_labels(self) -> [&'static str; 4] {
        let alice = if self.alice_primed() { ["D1'", "D2'"] } else { ["D1", "D2"] };
        let bob = if self.bob_primed() { ["D3'", "D4'"] } else { ["D3", "D4"] };
        [alice[0], alice[1], bob[0], bob[1]]
    }
}

impl fmt::Display for HardyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Splitter amplitudes of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyParams {
    /// Reflection amplitude of both source splitters.
    pub source_r: f64,
    /// Reflection amplitude of the central splitter.
    pub central_r: f64,
    /// Transmission amplitude of both detection splitters.
    pub detection_t: f64,
}

impl Default for HardyParams {
    fn default() -> Self {
        Self {
            source_r: FRAC_1_SQRT_2,
            central_r: FRAC_1_SQRT_2,
            detection_t: (1.0f64 / 3.0).sqrt(),
        }
    }
}

/// Transfer matrices of the four configurations, with the solved path
/// phases on the inner arms `e` (Alice) and `f` (Bob).
#[derive(Debug, Clone, PartialEq)]
pub struct HardyNetwork {
    pub params: HardyParams,
    pub path_phases: [f64; 2],
    pub transfer: BTreeMap<HardyConfig, TransferMatrix>,
}

fn slot(index: usize) -> ModeId {
    let label = match index {
        C => "c",
        E => "w-e",
        D => "d",
        _ => "x-f",
    };
    ModeId::new(index, label)
}

fn splitter(r: f64, p: usize, q: usize) -> Result<OpticalElement> {
    beamsplitter_element(r, (1.0 - r * r).max(0.0).sqrt(), 0.0, (slot(p), slot(q)))
}

fn elements(params: &HardyParams, phases: [f64; 2], config: HardyConfig) -> Result<Vec<OpticalElement>> {
    let t = params.detection_t;
    let r_det = (1.0 - t * t).max(0.0).sqrt();
    let mut els = vec![
        splitter(params.source_r, C, E)?,
        splitter(params.source_r, D, F)?,
        splitter(params.central_r, E, F)?,
        phase_shifter(phases[0], slot(E)),
        phase_shifter(phases[1], slot(F)),
    ];
    if !config.alice_primed() {
        els.push(beamsplitter_element(r_det, t, 0.0, (slot(C), slot(E)))?);
    }
    if !config.bob_primed() {
        els.push(beamsplitter_element(r_det, t, 0.0, (slot(D), slot(F)))?);
    }
    Ok(els)
}

fn compose(params: &HardyParams, phases: [f64; 2], config: HardyConfig) -> Result<TransferMatrix> {
    let els = elements(params, phases, config)?;
    let labels = config.detector_labels();
    let detectors: Vec<ModeId> = config
        .detector_slots()
        .iter()
        .zip(labels)
        .map(|(&s, l)| ModeId::new(s, l))
        .collect();
    compose_network(&els, &[ModeId::new(C, "alpha"), ModeId::new(D, "beta")], &detectors)
}

/// Phase `φ` with `a + b·e^{iφ} = 0`, or an error naming the constraint.
fn cancel_phase(a: Complex64, b: Complex64, constraint: &str) -> Result<f64> {
    if (a.norm() - b.norm()).abs() > HARDY_ZERO_TOL {
        return Err(Error::HardyConstraint(format!(
            "{constraint}: path amplitudes {:.6} and {:.6} cannot cancel",
            a.norm(),
            b.norm()
        )));
    }
    if a.norm() <= HARDY_ZERO_TOL {
        return Ok(0.0);
    }
    let phi = reduce_angle((-a).arg() - b.arg());
    // snap floating noise around a zero phase
    Ok(if phi.abs() < 1e-15 { 0.0 } else { phi })
}

impl HardyNetwork {
    /// Solve the path phases that cancel α→D₂ and β→D₃, compose all four
    /// configurations and validate the cancellations.
    pub fn new(params: HardyParams) -> Result<Self> {
        // amplitudes with zero path phases, split into the outer-arm and
        // inner-arm contributions at each detection splitter
        let primed = compose(&params, [0.0, 0.0], HardyConfig::DPrimeDPrime)?;
        let t = Complex64::new(params.detection_t, 0.0);
        let ir = Complex64::new(0.0, (1.0 - params.detection_t.powi(2)).max(0.0).sqrt());
        // primed rows: 0 = c, 1 = e, 2 = f, 3 = d; columns α, β
        let alice = cancel_phase(t * primed.get(0, 0), ir * primed.get(1, 0), "alpha must not reach D2")?;
        let bob = cancel_phase(t * primed.get(3, 1), ir * primed.get(2, 1), "beta must not reach D3")?;
        let path_phases = [alice, bob];
        let mut transfer = BTreeMap::new();
        for config in HardyConfig::ALL {
            transfer.insert(config, compose(&params, path_phases, config)?);
        }
        let net = Self {
            params,
            path_phases,
            transfer,
        };
        let dd = net.matrix(HardyConfig::DD);
        if dd.get(1, 0).norm() > HARDY_ZERO_TOL {
            return Err(Error::HardyConstraint(format!(
                "alpha must not reach D2 (|amplitude| = {:e})",
                dd.get(1, 0).norm()
            )));
        }
        if dd.get(2, 1).norm() > HARDY_ZERO_TOL {
            return Err(Error::HardyConstraint(format!(
                "beta must not reach D3 (|amplitude| = {:e})",
                dd.get(2, 1).norm()
            )));
        }
        Ok(net)
    }

    pub fn matrix(&self, config: HardyConfig) -> &TransferMatrix {
        &self.transfer[&config]
    }

    pub fn is_reference(&self) -> bool {
        self.params == HardyParams::default() && self.path_phases == [0.0, 0.0]
    }
}

/// The reference interferometer: balanced source and central splitters,
/// detection transmission probability 1/3. Checks that
/// `|C_DD(0,3;3,0)| = 1/216` for three particles per source.
pub fn build_hardy_network() -> Result<HardyNetwork> {
    let net = HardyNetwork::new(HardyParams::default())?;
    let c = amplitude(
        net.matrix(HardyConfig::DD),
        &SourceSpec::new([3, 3]),
        &OccupationVector(vec![0, 3, 3, 0]),
    )?;
    if (c.norm() - 1.0 / 216.0).abs() > HARDY_ZERO_TOL {
        return Err(Error::HardyConstraint(format!(
            "|C_DD(0,3;3,0)| = {} instead of 1/216",
            c.norm()
        )));
    }
    Ok(net)
}

fn surd(num: i64, den: i64, radicand: i64) -> Surd {
    Surd::radical(BigRational::new(num.into(), den.into()), radicand).expect("radicand in field")
}

/// Reference transfer matrix in exact arithmetic, rows in detector order.
pub fn exact_transfer(config: HardyConfig) -> Vec<Vec<ExactComplex>> {
    let splitter = |t: Surd, r: Surd| -> [[ExactComplex; 2]; 2] {
        let t = ExactComplex::real(t);
        let ir = ExactComplex::new(Surd::zero(), r);
        [[t.clone(), ir.clone()], [ir, t]]
    };
    let half = surd(1, 2, 2);
    let mut ops = vec![
        SlotOp::Two { p: C, q: E, m: splitter(half.clone(), half.clone()) },
        SlotOp::Two { p: D, q: F, m: splitter(half.clone(), half.clone()) },
        SlotOp::Two { p: E, q: F, m: splitter(half.clone(), half) },
    ];
    let det = splitter(surd(1, 3, 3), surd(1, 3, 6));
    if !config.alice_primed() {
        ops.push(SlotOp::Two { p: C, q: E, m: det.clone() });
    }
    if !config.bob_primed() {
        ops.push(SlotOp::Two { p: D, q: F, m: det });
    }
    propagate(4, &ops, &[C, D], &config.detector_slots())
}

/// Exact amplitude `C_XY(m)` of the reference interferometer.
pub fn exact_hardy_amplitude(config: HardyConfig, per_source: u32, m: &OccupationVector) -> Result<ExactAmplitude> {
    exact_amplitude(&exact_transfer(config), &SourceSpec::new([per_source, per_source]), m)
}

/// Every amplitude `C_XY(m₁,m₂;m₃,m₄)` for `N/2` particles per source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyAmplitudeTable {
    pub config: HardyConfig,
    pub n_particles: u32,
    pub entries: BTreeMap<OccupationVector, Complex64>,
}

impl HardyAmplitudeTable {
    pub fn amplitude(&self, m: &OccupationVector) -> Complex64 {
        self.entries.get(m).copied().unwrap_or_default()
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn to_distribution(&self) -> Result<OutcomeDistribution> {
        OutcomeDistribution::from_probabilities(
            4,
            self.n_particles,
            self.entries.iter().map(|(m, c)| (m.clone(), c.norm_sqr())).collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|(m, c)| {
                let mut row = vec![self.config.label().to_string()];
                row.extend(m.0.iter().map(u32::to_string));
                row.extend([fmt_f64(c.re), fmt_f64(c.im), fmt_f64(c.norm_sqr())]);
                row
            })
            .collect();
        crate::output::write_rows(out, &["config", "m1", "m2", "m3", "m4", "re", "im", "prob"], &rows)
    }
}

fn half(n: u32) -> Result<u32> {
    if n % 2 != 0 {
        return Err(Error::Domain(format!("particle number {n} is odd")));
    }
    Ok(n / 2)
}

pub fn hardy_amplitudes(net: &HardyNetwork, n: u32, config: HardyConfig) -> Result<HardyAmplitudeTable> {
    let k = half(n)?;
    let u = net.matrix(config);
    let s = SourceSpec::new([k, k]);
    let entries = enumerate_outcomes(4, n)
        .into_par_iter()
        .map(|m| amplitude(u, &s, &m).map(|c| (m, c)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(HardyAmplitudeTable {
        config,
        n_particles: n,
        entries,
    })
}

fn conditional(
    table: &HardyAmplitudeTable,
    given: impl Fn(&OccupationVector) -> bool,
    target: impl Fn(&OccupationVector) -> bool,
) -> Result<f64> {
    let mut mass = 0.0;
    let mut hit = 0.0;
    for (m, c) in &table.entries {
        if given(m) {
            let p = c.norm_sqr();
            mass += p;
            if target(m) {
                hit += p;
            }
        }
    }
    if mass <= DEGENERATE_MASS {
        return Err(Error::DegenerateCondition);
    }
    Ok(hit / mass)
}

/// `P(Bob sees (N/2, 0) on primed detectors | Alice sees (0, N/2))` in DD′
/// and `P(Alice sees (0, N/2) on primed detectors | Bob sees (N/2, 0))` in D′D.
pub fn certainty_check(net: &HardyNetwork, n: u32) -> Result<(f64, f64)> {
    let k = half(n)?;
    let dd_prime = hardy_amplitudes(net, n, HardyConfig::DDPrime)?;
    let d_prime_d = hardy_amplitudes(net, n, HardyConfig::DPrimeD)?;
    let bob = conditional(&dd_prime, |m| m.0[0] == 0 && m.0[1] == k, |m| m.0[2] == k)?;
    let alice = conditional(&d_prime_d, |m| m.0[2] == k && m.0[3] == 0, |m| m.0[1] == k)?;
    Ok((bob, alice))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyCertificate {
    pub n_particles: u32,
    /// `|C_DD(0,N/2;N/2,0)|²`.
    pub nonzero_event_probability: f64,
    /// DD′ certainty for Bob, then D′D certainty for Alice.
    pub certainties: [f64; 2],
    /// `|C_D′D′(0,N/2;N/2,0)|`.
    pub forbidden_event_amplitude: f64,
    pub verdict: bool,
    pub zero_tolerance: f64,
    pub certainty_tolerance: f64,
}

impl HardyCertificate {
    pub fn verdict_from_evidence(&self) -> bool {
        self.nonzero_event_probability > self.zero_tolerance
            && self
                .certainties
                .iter()
                .all(|c| (c - 1.0).abs() <= self.certainty_tolerance)
            && self.forbidden_event_amplitude <= self.zero_tolerance
    }
}

/// Evaluate the ingredients of the Hardy argument for `N/2` per source.
pub fn impossibility_certificate(net: &HardyNetwork, n: u32) -> Result<HardyCertificate> {
    let k = half(n)?;
    let s = SourceSpec::new([k, k]);
    let event = OccupationVector(vec![0, k, k, 0]);
    let nonzero = amplitude(net.matrix(HardyConfig::DD), &s, &event)?.norm_sqr();
    let forbidden = amplitude(net.matrix(HardyConfig::DPrimeDPrime), &s, &event)?.norm();
    // an even split never fails to condition, but an empty one is possible
    // for modified splitters
    let certainties = match certainty_check(net, n) {
        Ok((a, b)) => [a, b],
        Err(Error::DegenerateCondition) => [f64::NAN, f64::NAN],
        Err(e) => return Err(e),
    };
    let mut cert = HardyCertificate {
        n_particles: n,
        nonzero_event_probability: nonzero,
        certainties,
        forbidden_event_amplitude: forbidden,
        verdict: false,
        zero_tolerance: HARDY_ZERO_TOL,
        certainty_tolerance: CERTAINTY_TOL,
    };
    cert.verdict = cert.verdict_from_evidence();
    Ok(cert)
}

/// Output statistics of a balanced splitter with `n` particles on each input.
pub fn central_bs_parity_distribution(n: u32) -> Result<OutcomeDistribution> {
    let u = compose_network(
        &[balanced_splitter(ModeId::new(0, "left"), ModeId::new(1, "right"))],
        &[ModeId::new(0, "left-in"), ModeId::new(1, "right-in")],
        &[ModeId::new(0, "left-out"), ModeId::new(1, "right-out")],
    )?;
    distribution(&u, &SourceSpec::new([n, n]))
}

/// Largest change of one station's marginal statistics when the other
/// station switches detectors.
pub fn no_signaling_deviation(net: &HardyNetwork, n: u32) -> Result<f64> {
    let mut marginals = BTreeMap::new();
    for config in HardyConfig::ALL {
        let dist = hardy_amplitudes(net, n, config)?.to_distribution()?;
        marginals.insert(config, (dist.marginal(&[0, 1]), dist.marginal(&[2, 3])));
    }
    let diff = |a: &BTreeMap<Vec<u32>, f64>, b: &BTreeMap<Vec<u32>, f64>| -> f64 {
        a.keys()
            .chain(b.keys())
            .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    };
    let mut worst = 0.0f64;
    for alice_primed in [false, true] {
        let a = &marginals[&HardyConfig::from_flags(alice_primed, false)].0;
        let b = &marginals[&HardyConfig::from_flags(alice_primed, true)].0;
        worst = worst.max(diff(a, b));
    }
    for bob_primed in [false, true] {
        let a = &marginals[&HardyConfig::from_flags(false, bob_primed)].1;
        let b = &marginals[&HardyConfig::from_flags(true, bob_primed)].1;
        worst = worst.max(diff(a, b));
    }
    Ok(worst)
}

/// Amplitudes that vanish in the argument for three particles per source:
/// the forbidden D′D′ event, the three DD′ outcomes excluded by Alice's
/// detection splitter, and their mirror images in D′D.
pub fn stated_zero_amplitudes() -> Vec<(HardyConfig, OccupationVector)> {
    let v = |a: [u32; 4]| OccupationVector(a.to_vec());
    vec![
        (HardyConfig::DPrimeDPrime, v([0, 3, 3, 0])),
        (HardyConfig::DDPrime, v([0, 3, 1, 2])),
        (HardyConfig::DDPrime, v([0, 3, 2, 1])),
        (HardyConfig::DDPrime, v([0, 3, 0, 3])),
        (HardyConfig::DPrimeD, v([2, 1, 3, 0])),
        (HardyConfig::DPrimeD, v([1, 2, 3, 0])),
        (HardyConfig::DPrimeD, v([3, 0, 3, 0])),
    ]
}
