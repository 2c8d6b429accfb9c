//! Linear mode transformations: beamsplitters, phase shifters and mirrors,
//! composed into the transfer matrix that maps source modes onto detectors.
//!
//! Conventions: mode slots are physical paths. A beamsplitter acting on the
//! ordered slot pair `(p, q)` has the single-particle matrix (rows = outputs)
//!
//! ```text
//! [ t             i r e^{-iφ} ]
//! [ i r e^{iφ}    t           ]
//! ```
//!
//! so a transmitted particle stays on its path with a real positive
//! amplitude, and a reflected particle changes path and picks up `i`. Mirrors
//! contribute exactly one factor `i`. Phase shifters multiply by `e^{iφ}`.
//! The transfer coefficient `u[i][γ]` is the amplitude for a particle from
//! source `γ` to reach detector `i`, equivalently `a_i = Σ_γ u[i][γ] a_γ`.

mod network;

pub use network::{ElementDoc, ModeDoc, NetworkDoc};

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tolerance used when validating element and network unitarity.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeId {
    pub index: usize,
    pub label: String,
}

impl ModeId {
    pub fn new(index: usize, label: impl Into<String>) -> Self {
        Self {
            index,
            label: label.into(),
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.label, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementKind {
    Beamsplitter,
    PhaseShifter,
    Mirror,
}

impl ElementKind {
    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Beamsplitter => "beamsplitter",
            ElementKind::PhaseShifter => "phase-shifter",
            ElementKind::Mirror => "mirror",
        }
    }
}

/// One optical element acting on one or two mode slots.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalElement {
    pub kind: ElementKind,
    pub modes: Vec<ModeId>,
    /// Reflection amplitude including the factor `i` (beamsplitters only).
    pub reflection: Complex64,
    /// Real transmission amplitude (beamsplitters only).
    pub transmission: Complex64,
    pub phase: f64,
}

/// Build a beamsplitter with reflection amplitude `i r e^{i extra_phase}` and
/// transmission `t`.
pub fn beamsplitter_element(
    r: f64,
    t: f64,
    extra_phase: f64,
    modes: (ModeId, ModeId),
) -> Result<OpticalElement> {
    if !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&t) {
        return Err(Error::NonNormalizedSplitter {
            r,
            t,
            norm: r * r + t * t,
        });
    }
    let norm = r * r + t * t;
    if (norm - 1.0).abs() > UNITARITY_TOL {
        return Err(Error::NonNormalizedSplitter { r, t, norm });
    }
    let element = OpticalElement {
        kind: ElementKind::Beamsplitter,
        modes: vec![modes.0, modes.1],
        reflection: Complex64::i() * r * Complex64::from_polar(1.0, extra_phase),
        transmission: Complex64::new(t, 0.0),
        phase: extra_phase,
    };
    element.validate(0)?;
    Ok(element)
}

/// Balanced splitter, `r = t = 1/√2`.
pub fn balanced_splitter(p: ModeId, q: ModeId) -> OpticalElement {
    beamsplitter_element(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, (p, q))
        .expect("balanced splitter is unitary")
}

pub fn phase_shifter(phase: f64, mode: ModeId) -> OpticalElement {
    OpticalElement {
        kind: ElementKind::PhaseShifter,
        modes: vec![mode],
        reflection: Complex64::new(0.0, 0.0),
        transmission: Complex64::new(1.0, 0.0),
        phase,
    }
}

pub fn mirror(mode: ModeId) -> OpticalElement {
    OpticalElement {
        kind: ElementKind::Mirror,
        modes: vec![mode],
        reflection: Complex64::i(),
        transmission: Complex64::new(0.0, 0.0),
        phase: 0.0,
    }
}

impl OpticalElement {
    /// Single-mode factor, for phase shifters and mirrors.
    pub fn single_mode_factor(&self) -> Complex64 {
        match self.kind {
            ElementKind::PhaseShifter => Complex64::from_polar(1.0, self.phase),
            ElementKind::Mirror => Complex64::i() * Complex64::from_polar(1.0, self.phase),
            ElementKind::Beamsplitter => Complex64::new(1.0, 0.0),
        }
    }

    /// 2×2 single-particle matrix of a beamsplitter, rows = output slots.
    pub fn splitter_matrix(&self) -> [[Complex64; 2]; 2] {
        let r = self.reflection;
        let t = self.transmission;
        [[t, -r.conj()], [r, t]]
    }

    /// Check mode arity and unitarity. `index` is the position of the element
    /// in its network, used for error reporting.
    pub fn validate(&self, index: usize) -> Result<()> {
        let kind = self.kind.name();
        let invalid = |reason: String| Error::InvalidElement {
            index,
            kind,
            reason,
        };
        match self.kind {
            ElementKind::Beamsplitter => {
                if self.modes.len() != 2 {
                    return Err(invalid(format!("needs 2 modes, got {}", self.modes.len())));
                }
                if self.modes[0].index == self.modes[1].index {
                    return Err(invalid("both ports use the same mode".into()));
                }
                let m = self.splitter_matrix();
                let dev = unitarity_deviation_2x2(&m);
                if dev > UNITARITY_TOL {
                    return Err(invalid(format!("matrix not unitary (deviation {dev:e})")));
                }
            }
            ElementKind::PhaseShifter | ElementKind::Mirror => {
                if self.modes.len() != 1 {
                    return Err(invalid(format!("needs 1 mode, got {}", self.modes.len())));
                }
                if !self.phase.is_finite() {
                    return Err(invalid("phase is not finite".into()));
                }
            }
        }
        Ok(())
    }
}

fn unitarity_deviation_2x2(m: &[[Complex64; 2]; 2]) -> f64 {
    let mut dev: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let dot = m[0][a].conj() * m[0][b] + m[1][a].conj() * m[1][b];
            let target = if a == b { 1.0 } else { 0.0 };
            dev = dev.max((dot - target).norm());
        }
    }
    dev
}

/// Measurement angles of the three stations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AngleSettings {
    pub zeta: f64,
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi: Option<f64>,
}

impl AngleSettings {
    pub fn two(zeta: f64, theta: f64) -> Self {
        Self {
            zeta,
            theta,
            chi: None,
        }
    }

    pub fn three(zeta: f64, theta: f64, chi: f64) -> Self {
        Self {
            zeta,
            theta,
            chi: Some(chi),
        }
    }

    /// Angles reduced to (−π, π].
    pub fn reduced(&self) -> Self {
        Self {
            zeta: reduce_angle(self.zeta),
            theta: reduce_angle(self.theta),
            chi: self.chi.map(reduce_angle),
        }
    }
}

/// Reduce an angle to (−π, π].
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Transfer coefficients `u[i][γ]`, rows indexed by detectors and columns by
/// sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
    pub detector_labels: Vec<String>,
    pub source_labels: Vec<String>,
}

impl TransferMatrix {
    /// Build from row-major entries. Only shape is checked; use
    /// [`check_isometry`] for the isometry invariant.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged transfer matrix".into()));
        }
        if n_rows < n_cols {
            return Err(Error::Dimension(format!(
                "{n_rows} detector rows cannot carry {n_cols} source columns"
            )));
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            entries: rows.into_iter().flatten().collect(),
            detector_labels: (1..=n_rows).map(|i| format!("D{i}")).collect(),
            source_labels: (0..n_cols).map(|g| format!("S{g}")).collect(),
        })
    }

    pub fn with_labels(
        mut self,
        detectors: impl IntoIterator<Item = impl Into<String>>,
        sources: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        let d: Vec<String> = detectors.into_iter().map(Into::into).collect();
        let s: Vec<String> = sources.into_iter().map(Into::into).collect();
        if d.len() == self.rows {
            self.detector_labels = d;
        }
        if s.len() == self.cols {
            self.source_labels = s;
        }
        self
    }

    pub fn detectors(&self) -> usize {
        self.rows
    }

    pub fn sources(&self) -> usize {
        self.cols
    }

    pub fn get(&self, detector: usize, source: usize) -> Complex64 {
        self.entries[detector * self.cols + source]
    }

    pub fn set(&mut self, detector: usize, source: usize, value: Complex64) {
        self.entries[detector * self.cols + source] = value;
    }

    pub fn row(&self, detector: usize) -> &[Complex64] {
        &self.entries[detector * self.cols..(detector + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks(self.cols.max(1)).take(self.rows)
    }

    /// Reorder detector rows: row `k` of the result is row `order[k]` of self.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.rows || order.iter().collect::<BTreeSet<_>>().len() != self.rows
        {
            return Err(Error::Dimension("row order is not a permutation".into()));
        }
        let mut out = self.clone();
        for (k, &src) in order.iter().enumerate() {
            for g in 0..self.cols {
                out.set(k, g, self.get(src, g));
            }
            out.detector_labels[k] = self.detector_labels[src].clone();
        }
        Ok(out)
    }

    /// Multiply one source column by `e^{iφ}`.
    pub fn rephase_source(&self, source: usize, phase: f64) -> Self {
        let mut out = self.clone();
        let f = Complex64::from_polar(1.0, phase);
        for i in 0..self.rows {
            out.set(i, source, self.get(i, source) * f);
        }
        out
    }

    /// Largest deviation of `U^† U` from the identity.
    pub fn isometry_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for a in 0..self.cols {
            for b in 0..self.cols {
                let dot: Complex64 = (0..self.rows)
                    .map(|i| self.get(i, a).conj() * self.get(i, b))
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                dev = dev.max((dot - target).norm());
            }
        }
        dev
    }
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>6}", "")?;
        for s in &self.source_labels {
            write!(f, " {s:>24}")?;
        }
        writeln!(f)?;
        for (i, row) in self.rows().enumerate() {
            write!(f, "{:>6}", self.detector_labels[i])?;
            for z in row {
                write!(f, " {:>11.8}{:+.8}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// True iff every entry of `U^† U − I` is within `tol`.
pub fn check_isometry(u: &TransferMatrix, tol: f64) -> bool {
    u.isometry_deviation() <= tol
}

/// An elementary operation on mode slots, generic over the amplitude field.
#[derive(Debug, Clone)]
pub(crate) enum SlotOp<T> {
    Two { p: usize, q: usize, m: [[T; 2]; 2] },
    One { p: usize, factor: T },
}

/// Propagate one unit amplitude from each source slot through `ops` and read
/// it out at the detector slots. Slots are dense indices `0..n_slots`.
pub(crate) fn propagate<T: Scalar>(
    n_slots: usize,
    ops: &[SlotOp<T>],
    sources: &[usize],
    detectors: &[usize],
) -> Vec<Vec<T>> {
    let mut columns = Vec::with_capacity(sources.len());
    for &s in sources {
        let mut amp = vec![T::zero(); n_slots];
        amp[s] = T::one();
        for op in ops {
            match op {
                SlotOp::Two { p, q, m } => {
                    let ap = amp[*p].clone();
                    let aq = amp[*q].clone();
                    amp[*p] = m[0][0].clone() * ap.clone() + m[0][1].clone() * aq.clone();
                    amp[*q] = m[1][0].clone() * ap + m[1][1].clone() * aq;
                }
                SlotOp::One { p, factor } => {
                    amp[*p] = factor.clone() * amp[*p].clone();
                }
            }
        }
        columns.push(detectors.iter().map(|&d| amp[d].clone()).collect::<Vec<T>>());
    }
    // transpose to rows = detectors
    (0..detectors.len())
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect()
}

/// Compose an ordered element list into the transfer matrix from `sources`
/// to `detectors`. Source and detector labels become the matrix labels.
pub fn compose_network(
    elements: &[OpticalElement],
    sources: &[ModeId],
    detectors: &[ModeId],
) -> Result<TransferMatrix> {
    let mut labels: BTreeMap<usize, String> = BTreeMap::new();
    for el in elements {
        for m in &el.modes {
            match labels.get(&m.index) {
                Some(existing) if existing != &m.label => {
                    return Err(Error::ConflictingMode {
                        index: m.index,
                        first: existing.clone(),
                        second: m.label.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    labels.insert(m.index, m.label.clone());
                }
            }
        }
    }
    for (i, el) in elements.iter().enumerate() {
        el.validate(i)?;
    }
    let mut slot_ids: BTreeSet<usize> = labels.keys().copied().collect();
    slot_ids.extend(sources.iter().map(|m| m.index));
    slot_ids.extend(detectors.iter().map(|m| m.index));
    let dense: BTreeMap<usize, usize> = slot_ids.iter().enumerate().map(|(k, &s)| (s, k)).collect();

    let mut reach: BTreeSet<usize> = sources.iter().map(|m| m.index).collect();
    for el in elements {
        if el.kind == ElementKind::Beamsplitter
            && el.modes.iter().any(|m| reach.contains(&m.index))
        {
            reach.extend(el.modes.iter().map(|m| m.index));
        }
    }
    if let Some(d) = detectors.iter().find(|d| !reach.contains(&d.index)) {
        return Err(Error::DisconnectedDetector(d.to_string()));
    }

    let ops: Vec<SlotOp<Complex64>> = elements
        .iter()
        .map(|el| match el.kind {
            ElementKind::Beamsplitter => SlotOp::Two {
                p: dense[&el.modes[0].index],
                q: dense[&el.modes[1].index],
                m: el.splitter_matrix(),
            },
            _ => SlotOp::One {
                p: dense[&el.modes[0].index],
                factor: el.single_mode_factor(),
            },
        })
        .collect();
    let src: Vec<usize> = sources.iter().map(|m| dense[&m.index]).collect();
    let det: Vec<usize> = detectors.iter().map(|m| dense[&m.index]).collect();
    let rows = propagate(slot_ids.len(), &ops, &src, &det);
    let u = TransferMatrix::from_rows(rows)?.with_labels(
        detectors.iter().map(|m| m.label.clone()),
        sources.iter().map(|m| m.label.clone()),
    );
    let deviation = u.isometry_deviation();
    if deviation > UNITARITY_TOL {
        return Err(Error::NotIsometry { deviation });
    }
    Ok(u)
}

/// An element list together with its source and detector ports.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub elements: Vec<OpticalElement>,
    pub sources: Vec<ModeId>,
    pub detectors: Vec<ModeId>,
}

impl Network {
    pub fn compose(&self) -> Result<TransferMatrix> {
        compose_network(&self.elements, &self.sources, &self.detectors)
    }
}

/// Element-level description of the two-condensate interferometer.
///
/// Mode slots are the four arms `u, v, w, t`. Source α enters on arm `u`
/// (its reflected half goes to `v`), β enters on arm `w` (reflected half to
/// `t`). Alice mixes `(v, w)` after her shifter ζ on `v`; Bob mixes `(u, t)`
/// after his shifter θ on `t`.
pub fn two_source_network(zeta: f64, theta: f64) -> Network {
    let u = ModeId::new(0, "u");
    let v = ModeId::new(1, "v");
    let w = ModeId::new(2, "w");
    let t = ModeId::new(3, "t");
    let elements = vec![
        balanced_splitter(u.clone(), v.clone()),
        balanced_splitter(w.clone(), t.clone()),
        phase_shifter(zeta, v.clone()),
        phase_shifter(theta, t.clone()),
        balanced_splitter(v.clone(), w.clone()),
        balanced_splitter(u.clone(), t.clone()),
    ];
    Network {
        elements,
        sources: vec![ModeId::new(0, "alpha"), ModeId::new(2, "beta")],
        detectors: vec![
            ModeId::new(1, "D1"),
            ModeId::new(2, "D2"),
            ModeId::new(3, "D3"),
            ModeId::new(0, "D4"),
        ],
    }
}

/// The two-condensate transfer matrix, written out directly.
pub fn two_source_interferometer(zeta: f64, theta: f64) -> TransferMatrix {
    let i = Complex64::i();
    let ez = Complex64::from_polar(1.0, zeta);
    let et = Complex64::from_polar(1.0, theta);
    let one = Complex64::new(1.0, 0.0);
    let rows = vec![
        vec![i * ez * 0.5, i * 0.5],
        vec![-ez * 0.5, one * 0.5],
        vec![i * 0.5, i * et * 0.5],
        vec![one * 0.5, -et * 0.5],
    ];
    TransferMatrix::from_rows(rows)
        .expect("4x2 matrix")
        .with_labels(["D1", "D2", "D3", "D4"], ["alpha", "beta"])
}

/// Element-level description of the three-condensate ring.
///
/// Each source splits into one arm per neighbouring station: α feeds A
/// (reflected) and C (transmitted), β feeds B (reflected) and A, γ feeds C
/// (reflected) and B. Station A carries shifter σ on the α arm, B carries θ
/// on the β arm, C carries χ on the γ arm, and each station mixes its two
/// arms on a balanced splitter exactly like Alice's station in
/// [`two_source_network`].
pub fn three_source_network(sigma: f64, theta: f64, chi: f64) -> Network {
    let a_a = ModeId::new(0, "alpha->A");
    let a_c = ModeId::new(1, "alpha->C");
    let b_b = ModeId::new(2, "beta->B");
    let b_a = ModeId::new(3, "beta->A");
    let g_c = ModeId::new(4, "gamma->C");
    let g_b = ModeId::new(5, "gamma->B");
    let elements = vec![
        balanced_splitter(a_c.clone(), a_a.clone()),
        balanced_splitter(b_a.clone(), b_b.clone()),
        balanced_splitter(g_b.clone(), g_c.clone()),
        phase_shifter(sigma, a_a.clone()),
        phase_shifter(theta, b_b.clone()),
        phase_shifter(chi, g_c.clone()),
        balanced_splitter(a_a.clone(), b_a.clone()),
        balanced_splitter(b_b.clone(), g_b.clone()),
        balanced_splitter(g_c.clone(), a_c.clone()),
    ];
    Network {
        elements,
        sources: vec![
            ModeId::new(1, "alpha"),
            ModeId::new(3, "beta"),
            ModeId::new(5, "gamma"),
        ],
        detectors: vec![
            ModeId::new(0, "A1"),
            ModeId::new(3, "A2"),
            ModeId::new(2, "B1"),
            ModeId::new(5, "B2"),
            ModeId::new(4, "C1"),
            ModeId::new(1, "C2"),
        ],
    }
}

/// 6×3 transfer matrix of the three-condensate ring. Detector order is
/// (A1, A2, B1, B2, C1, C2).
pub fn three_source_ring(sigma: f64, theta: f64, chi: f64) -> TransferMatrix {
    three_source_network(sigma, theta, chi)
        .compose()
        .expect("ring network is a valid isometry")
}

/// A Haar-like random isometry (Gaussian entries, Gram–Schmidt on columns).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> TransferMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<Complex64> = (0..rows)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        for c in &columns {
            let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(c) {
                *x -= proj * a;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        columns.push(v);
    }
    let rows_vec = (0..rows)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect();
    TransferMatrix::from_rows(rows_vec).expect("rows >= cols")
}
