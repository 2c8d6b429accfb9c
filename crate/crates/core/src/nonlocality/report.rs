use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BchshOptimum, GhzReport};
use crate::hardy::HardyCertificate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Bchsh,
    Ghz,
    Hardy,
}

/// A verdict together with the numbers it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub kind: ViolationKind,
    pub verdict: bool,
    pub evidence: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl ViolationReport {
    pub fn from_bchsh(opt: &BchshOptimum) -> Self {
        let evidence = BTreeMap::from([
            ("n_particles".to_string(), opt.n_particles as f64),
            ("xi_star".to_string(), opt.xi_star),
            ("q_max".to_string(), opt.q_max),
            ("local_bound".to_string(), 2.0),
        ]);
        Self {
            kind: ViolationKind::Bchsh,
            verdict: opt.violates(),
            evidence,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn from_ghz(report: &GhzReport) -> Self {
        let mut evidence = BTreeMap::from([("n_particles".to_string(), f64::from(report.n_particles))]);
        for (k, e) in report.evidence.iter().enumerate() {
            evidence.insert(format!("product_{k}"), e.correlation);
        }
        Self {
            kind: ViolationKind::Ghz,
            verdict: report.contradiction,
            evidence,
            tolerances: BTreeMap::from([("unit".to_string(), report.tolerance)]),
        }
    }

    pub fn from_hardy(cert: &HardyCertificate) -> Self {
        let evidence = BTreeMap::from([
            ("n_particles".to_string(), f64::from(cert.n_particles)),
            ("event_probability".to_string(), cert.nonzero_event_probability),
            ("certainty_bob".to_string(), cert.certainties[0]),
            ("certainty_alice".to_string(), cert.certainties[1]),
            ("zero_forbidden".to_string(), cert.forbidden_event_amplitude),
        ]);
        Self {
            kind: ViolationKind::Hardy,
            verdict: cert.verdict,
            evidence,
            tolerances: BTreeMap::from([
                ("zero".to_string(), cert.zero_tolerance),
                ("certainty".to_string(), cert.certainty_tolerance),
            ]),
        }
    }

    /// Recompute the verdict from `evidence` and `tolerances` alone.
    pub fn reproduce(&self) -> Option<bool> {
        let get = |k: &str| self.evidence.get(k).copied();
        match self.kind {
            ViolationKind::Bchsh => Some(get("q_max")? > get("local_bound")?),
            ViolationKind::Ghz => {
                let tol = *self.tolerances.get("unit")?;
                let minus = (0..3).all(|k| get(&format!("product_{k}")).is_some_and(|v| (v + 1.0).abs() <= tol));
                Some(minus && (get("product_3")? - 1.0).abs() <= tol)
            }
            ViolationKind::Hardy => {
                let tol = *self.tolerances.get("zero")?;
                let certain = *self.tolerances.get("certainty")?;
                let zeros = self
                    .evidence
                    .iter()
                    .filter(|(k, _)| k.starts_with("zero_"))
                    .all(|(_, v)| v.abs() <= tol);
                let certainties = self
                    .evidence
                    .iter()
                    .filter(|(k, _)| k.starts_with("certainty_"))
                    .all(|(_, v)| (v - 1.0).abs() <= certain);
                Some(zeros && certainties && get("event_probability")? > tol)
            }
        }
    }

    pub fn to_tree(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}
