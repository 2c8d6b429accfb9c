//! Structured-text network descriptions.
//!
//! ```toml
//! [[modes]]
//! index = 0
//! label = "u"
//!
//! [[elements]]
//! kind = "beamsplitter"
//! modes = [0, 1]
//! r = 0.7071067811865476
//! t = 0.7071067811865476
//!
//! [[elements]]
//! kind = "phase-shifter"
//! modes = [1]
//! phase = 0.25
//!
//! [[sources]]
//! index = 0
//! label = "alpha"
//!
//! [[detectors]]
//! index = 1
//! label = "D1"
//! ```
//!
//! A beamsplitter may give `r`, `t` or both; a missing one is completed from
//! `r² + t² = 1`. [`NetworkDoc::to_toml`] writes the canonical form with both
//! amplitudes and the phase spelled out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    beamsplitter_element, mirror, phase_shifter, ElementKind, ModeId, Network, OpticalElement,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDoc {
    pub index: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub kind: ElementKind,
    pub modes: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    #[serde(default)]
    pub modes: Vec<ModeDoc>,
    #[serde(default)]
    pub elements: Vec<ElementDoc>,
    pub sources: Vec<ModeDoc>,
    pub detectors: Vec<ModeDoc>,
}

impl NetworkDoc {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Network(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Network(e.to_string()))
    }

    /// Resolve mode labels and build validated elements.
    pub fn to_network(&self) -> Result<Network> {
        let mut labels: BTreeMap<usize, String> = BTreeMap::new();
        for m in &self.modes {
            if let Some(prev) = labels.insert(m.index, m.label.clone()) {
                if prev != m.label {
                    return Err(Error::ConflictingMode {
                        index: m.index,
                        first: prev,
                        second: m.label.clone(),
                    });
                }
            }
        }
        let mode = |idx: usize| -> Result<ModeId> {
            labels
                .get(&idx)
                .map(|l| ModeId::new(idx, l.clone()))
                .ok_or(Error::UnknownMode(idx))
        };
        let mut elements = Vec::with_capacity(self.elements.len());
        for (k, el) in self.elements.iter().enumerate() {
            let built = match el.kind {
                ElementKind::Beamsplitter => {
                    if el.modes.len() != 2 {
                        return Err(Error::InvalidElement {
                            index: k,
                            kind: el.kind.name(),
                            reason: format!("needs 2 modes, got {}", el.modes.len()),
                        });
                    }
                    let (r, t) = match (el.r, el.t) {
                        (Some(r), Some(t)) => (r, t),
                        (Some(r), None) => (r, (1.0 - r * r).max(0.0).sqrt()),
                        (None, Some(t)) => ((1.0 - t * t).max(0.0).sqrt(), t),
                        (None, None) => {
                            return Err(Error::InvalidElement {
                                index: k,
                                kind: el.kind.name(),
                                reason: "needs r or t".into(),
                            })
                        }
                    };
                    beamsplitter_element(r, t, el.phase, (mode(el.modes[0])?, mode(el.modes[1])?))?
                }
                ElementKind::PhaseShifter | ElementKind::Mirror => {
                    if el.modes.len() != 1 {
                        return Err(Error::InvalidElement {
                            index: k,
                            kind: el.kind.name(),
                            reason: format!("needs 1 mode, got {}", el.modes.len()),
                        });
                    }
                    let m = mode(el.modes[0])?;
                    if el.kind == ElementKind::Mirror {
                        let mut e = mirror(m);
                        e.phase = el.phase;
                        e
                    } else {
                        phase_shifter(el.phase, m)
                    }
                }
            };
            elements.push(built);
        }
        let port = |m: &ModeDoc| ModeId::new(m.index, m.label.clone());
        Ok(Network {
            elements,
            sources: self.sources.iter().map(port).collect(),
            detectors: self.detectors.iter().map(port).collect(),
        })
    }

    pub fn from_network(net: &Network) -> Self {
        let mut modes: BTreeMap<usize, String> = BTreeMap::new();
        for el in &net.elements {
            for m in &el.modes {
                modes.entry(m.index).or_insert_with(|| m.label.clone());
            }
        }
        let elements = net.elements.iter().map(element_doc).collect();
        let port = |m: &ModeId| ModeDoc {
            index: m.index,
            label: m.label.clone(),
        };
        Self {
            modes: modes
                .into_iter()
                .map(|(index, label)| ModeDoc { index, label })
                .collect(),
            elements,
            sources: net.sources.iter().map(port).collect(),
            detectors: net.detectors.iter().map(port).collect(),
        }
    }
}

fn element_doc(el: &OpticalElement) -> ElementDoc {
    let modes = el.modes.iter().map(|m| m.index).collect();
    match el.kind {
        ElementKind::Beamsplitter => ElementDoc {
            kind: el.kind,
            modes,
            r: Some(el.reflection.norm()),
            t: Some(el.transmission.re),
            phase: el.phase,
        },
        _ => ElementDoc {
            kind: el.kind,
            modes,
            r: None,
            t: None,
            phase: el.phase,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{check_isometry, two_source_interferometer, two_source_network};

    const SPLITTER: &str = r#"
[[modes]]
index = 0
label = "a"

[[modes]]
index = 1
label = "b"

[[elements]]
kind = "beamsplitter"
modes = [0, 1]
r = 0.7071067811865476

[[sources]]
index = 0
label = "alpha"

[[detectors]]
index = 1
label = "R"

[[detectors]]
index = 0
label = "T"
"#;

    #[test]
    fn parse_single_splitter() {
        let doc = NetworkDoc::from_toml(SPLITTER).unwrap();
        let u = doc.to_network().unwrap().compose().unwrap();
        assert_eq!(u.detector_labels, vec!["R", "T"]);
        assert!((u.get(0, 0).im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(check_isometry(&u, 1e-12));
    }

    #[test]
    fn canonical_form_round_trips_fig1() {
        let net = two_source_network(0.4, -1.3);
        let text = NetworkDoc::from_network(&net).to_toml().unwrap();
        let back = NetworkDoc::from_toml(&text).unwrap().to_network().unwrap();
        let u = back.compose().unwrap();
        let want = two_source_interferometer(0.4, -1.3);
        for i in 0..4 {
            for g in 0..2 {
                assert!((u.get(i, g) - want.get(i, g)).norm() < 1e-12);
            }
        }
        // canonical text is a fixed point
        let again = NetworkDoc::from_network(&back).to_toml().unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn unknown_mode_reported() {
        let text = SPLITTER.replace("modes = [0, 1]", "modes = [0, 7]");
        let err = NetworkDoc::from_toml(&text).unwrap().to_network();
        assert!(matches!(err, Err(Error::UnknownMode(7))));
    }

    #[test]
    fn bad_norm_reported() {
        let text = SPLITTER.replace("r = 0.7071067811865476", "r = 0.7\nt = 0.7");
        let err = NetworkDoc::from_toml(&text).unwrap().to_network();
        assert!(matches!(err, Err(Error::NonNormalizedSplitter { .. })));
    }

    #[test]
    fn malformed_text_reported() {
        assert!(matches!(
            NetworkDoc::from_toml("elements = 3"),
            Err(Error::Network(_))
        ));
    }
}
