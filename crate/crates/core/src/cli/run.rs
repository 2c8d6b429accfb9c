use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{Format, ScanAxis, Scenario, ScenarioConfig};
use super::CliError;
use crate::combinatorics::composition_count;
use crate::error::{Error, Result};
use crate::fock::{distribution, parity_expectation, sample_outcomes, ParityAssignment, SourceSpec};
use crate::hardy::{
    build_hardy_network, certainty_check, hardy_amplitudes, impossibility_certificate,
    no_signaling_deviation, HardyConfig,
};
use crate::nonlocality::{
    bchsh_q, ghz_contradiction_certificate, ghz_correlation_closed_form, ghz_correlation_exact,
    maximize_bchsh, CERTIFICATE_ANGLES,
};
use crate::optics::{three_source_ring, two_source_interferometer, AngleSettings};
use crate::output::{fmt_f64, write_tree};
use crate::phase::{chsh_partial_maximum, compare_models, correlation_partial, QuadratureGrid};

/// Header and rows of the CSV output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let header: Vec<&str> = self.header.iter().map(String::as_str).collect();
        crate::output::write_rows(out, &header, &self.rows)
    }
}

/// Results at one scan point or particle number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub inputs: BTreeMap<String, f64>,
    pub outputs: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub scenario: Scenario,
    pub config: ScenarioConfig,
    /// Defaults and derived settings that influenced the numbers.
    pub resolved: BTreeMap<String, Value>,
    pub points: Vec<PointRecord>,
    pub summary: Value,
    pub table: Table,
    pub verdict: Option<bool>,
    pub engine_version: String,
    pub duration_seconds: f64,
}

fn angle_points(cfg: &ScenarioConfig) -> Vec<[f64; 3]> {
    let base = cfg.angles.unwrap_or([0.0; 3]);
    let axis = |k: usize, a: ScanAxis| -> Vec<f64> {
        cfg.scans.get(&a).map_or_else(|| vec![base[k]], |r| r.points())
    };
    let mut out = Vec::new();
    for z in axis(0, ScanAxis::Zeta) {
        for t in axis(1, ScanAxis::Theta) {
            for c in axis(2, ScanAxis::Chi) {
                out.push([z, t, c]);
            }
        }
    }
    out
}

fn check_cost(estimate: u128, cap: u64) -> Result<()> {
    if estimate > u128::from(cap) {
        return Err(Error::TooLarge {
            estimate,
            cap: u128::from(cap),
        });
    }
    Ok(())
}

fn grid_for(cfg: &ScenarioConfig, n: u32) -> Result<QuadratureGrid> {
    match cfg.quad_nodes {
        Some(k) => QuadratureGrid::uniform(k),
        None => Ok(QuadratureGrid::for_particles(n)),
    }
}

struct Outcome {
    points: Vec<PointRecord>,
    table: Table,
    summary: Value,
    resolved: BTreeMap<String, Value>,
    verdict: Option<bool>,
}

/// Run one configured scenario. Nothing is written; see [`write_record`].
pub fn run(cfg: &ScenarioConfig) -> std::result::Result<ResultRecord, CliError> {
    let start = Instant::now();
    let out = match cfg.scenario {
        Scenario::Dist => run_dist(cfg)?,
        Scenario::Compare => run_compare(cfg)?,
        Scenario::Bchsh => run_bchsh(cfg)?,
        Scenario::Ghz => run_ghz(cfg)?,
        Scenario::Hardy => run_hardy(cfg)?,
    };
    Ok(ResultRecord {
        scenario: cfg.scenario,
        config: cfg.clone(),
        resolved: out.resolved,
        points: out.points,
        summary: out.summary,
        table: out.table,
        verdict: out.verdict,
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        duration_seconds: start.elapsed().as_secs_f64(),
    })
}

/// CSV writes only the table, so repeated runs give identical bytes; the
/// tree format writes the whole record.
pub fn write_record(record: &ResultRecord, cfg: &ScenarioConfig) -> Result<()> {
    let sink: Box<dyn Write> = match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match cfg.format {
        Format::Csv => record.table.write_csv(sink),
        Format::Tree => write_tree(sink, &serde_json::to_value(record)?),
    }
}

fn run_dist(cfg: &ScenarioConfig) -> Result<Outcome> {
    let s = SourceSpec::new(cfg.populations.clone());
    let three = s.populations.len() == 3;
    let detectors = if three { 6 } else { 4 };
    let points = angle_points(cfg);
    check_cost(composition_count(detectors, s.total()) * points.len() as u128, cfg.max_outcomes)?;
    let pa = ParityAssignment::paired(detectors / 2);
    let per_point: Vec<(PointRecord, Vec<Vec<String>>)> = points
        .par_iter()
        .enumerate()
        .map(|(index, &[z, t, c])| {
            let u = if three {
                three_source_ring(z, t, c)
            } else {
                two_source_interferometer(z, t)
            };
            let dist = distribution(&u, &s)?;
            let corr = parity_expectation(&dist, &pa, None)?;
            let mut counts: BTreeMap<&_, usize> = BTreeMap::new();
            let draws = sample_outcomes(&dist, cfg.samples, cfg.seed.wrapping_add(index as u64))?;
            for m in &draws {
                *counts.entry(m).or_default() += 1;
            }
            let rows = dist
                .iter()
                .map(|(m, p)| {
                    let mut row = vec![index.to_string(), fmt_f64(z), fmt_f64(t)];
                    if three {
                        row.push(fmt_f64(c));
                    }
                    row.extend(m.0.iter().map(u32::to_string));
                    row.push(fmt_f64(p));
                    if cfg.samples > 0 {
                        let k = counts.get(m).copied().unwrap_or(0);
                        row.push(fmt_f64(k as f64 / cfg.samples as f64));
                    }
                    row
                })
                .collect();
            let mut inputs = BTreeMap::from([("zeta".to_string(), z), ("theta".to_string(), t)]);
            if three {
                inputs.insert("chi".to_string(), c);
            }
            let record = PointRecord {
                index,
                inputs,
                outputs: json!({
                    "parity_correlation": corr,
                    "total_probability": dist.total_probability(),
                    "outcomes": dist.len(),
                }),
            };
            Ok((record, rows))
        })
        .collect::<Result<_>>()?;
    let mut header = vec!["point", "zeta", "theta"];
    if three {
        header.push("chi");
    }
    let labels: Vec<String> = (1..=detectors).map(|i| format!("m{i}")).collect();
    header.extend(labels.iter().map(String::as_str));
    header.push("probability");
    if cfg.samples > 0 {
        header.push("frequency");
    }
    let mut table = Table::new(&header);
    let mut records = Vec::new();
    for (r, rows) in per_point {
        records.push(r);
        table.rows.extend(rows);
    }
    Ok(Outcome {
        points: records,
        table,
        summary: json!({ "populations": s.populations }),
        resolved: BTreeMap::from([
            ("amplitude_strategy".into(), json!("polynomial")),
            ("network".into(), json!(if three { "three-source ring" } else { "two-source interferometer" })),
            ("parity".into(), json!("paired (+1, -1) per station, unconditioned")),
        ]),
        verdict: None,
    })
}

fn run_compare(cfg: &ScenarioConfig) -> Result<Outcome> {
    let s = SourceSpec::new(cfg.populations.clone());
    let n = s.total();
    let grid = grid_for(cfg, n)?;
    let points = angle_points(cfg);
    check_cost(composition_count(4, n) * points.len() as u128, cfg.max_outcomes)?;
    let per_point: Vec<(PointRecord, Vec<Vec<String>>)> = points
        .par_iter()
        .enumerate()
        .map(|(index, &[z, t, _])| {
            let angles = AngleSettings::two(z, t);
            let report = compare_models(&s, &angles, &grid)?;
            let partial = cfg
                .m_measured
                .map(|m| correlation_partial(&s, m, &angles, &grid))
                .transpose()?;
            let rows = report
                .rows
                .iter()
                .map(|r| {
                    let mut row = vec![index.to_string(), fmt_f64(z), fmt_f64(t)];
                    row.extend(r.outcome.0.iter().map(u32::to_string));
                    row.extend([fmt_f64(r.p_quantum), fmt_f64(r.p_classical), fmt_f64(r.divergence)]);
                    row
                })
                .collect();
            let record = PointRecord {
                index,
                inputs: BTreeMap::from([("zeta".to_string(), z), ("theta".to_string(), t)]),
                outputs: json!({
                    "total_variation": report.total_variation,
                    "partial_correlation": partial,
                }),
            };
            Ok((record, rows))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "point", "zeta", "theta", "m1", "m2", "m3", "m4", "p_quantum", "p_classical", "divergence",
    ]);
    let mut records = Vec::new();
    for (r, rows) in per_point {
        records.push(r);
        table.rows.extend(rows);
    }
    let (summary, verdict) = match cfg.m_measured {
        Some(m) => {
            let best = chsh_partial_maximum(&s, m, &grid)?;
            (
                json!({ "m_measured": m, "chsh_max": best.q, "chsh_angles": best.angles }),
                Some(best.q > 2.0),
            )
        }
        None => (json!({}), None),
    };
    Ok(Outcome {
        points: records,
        table,
        summary,
        resolved: BTreeMap::from([
            ("quad_nodes".into(), json!([grid.n_lambda, grid.n_big_lambda])),
            ("classical_visibility".into(), json!(crate::phase::classical_visibility(s.populations[0], s.populations[1]))),
        ]),
        verdict,
    })
}

fn run_bchsh(cfg: &ScenarioConfig) -> Result<Outcome> {
    let mut records = Vec::new();
    let mut verdicts = Vec::new();
    let curve = cfg.scans.get(&ScanAxis::Xi);
    let mut table = match curve {
        Some(_) => Table::new(&["n", "xi", "q"]),
        None => Table::new(&[
            "n", "xi_star", "q_max", "phi_a", "phi_a_prime", "phi_b", "phi_b_prime", "violation",
        ]),
    };
    let mut resolved = BTreeMap::from([
        ("grid_points".into(), json!(10_000)),
        ("xi_tolerance".into(), json!(1e-10)),
        ("gaussian_threshold".into(), json!(crate::nonlocality::GAUSSIAN_THRESHOLD)),
    ]);
    for (index, &n) in cfg.particles.iter().enumerate() {
        let opt = maximize_bchsh(u64::from(n));
        let mut outputs = serde_json::to_value(opt)?;
        let mut violates = opt.violates();
        if let Some(m) = cfg.m_measured {
            let s = SourceSpec::new([n / 2, n / 2]);
            let grid = grid_for(cfg, n)?;
            let best = chsh_partial_maximum(&s, m, &grid)?;
            outputs["partial"] = json!({ "m_measured": m, "chsh_max": best.q, "chsh_angles": best.angles });
            resolved.insert(format!("quad_nodes_n{n}"), json!([grid.n_lambda, grid.n_big_lambda]));
            violates = best.q > 2.0;
        }
        verdicts.push(violates);
        match curve {
            Some(range) => {
                for xi in range.points() {
                    table
                        .rows
                        .push(vec![n.to_string(), fmt_f64(xi), fmt_f64(bchsh_q(u64::from(n), xi))]);
                }
            }
            None => {
                let mut row = vec![n.to_string(), fmt_f64(opt.xi_star), fmt_f64(opt.q_max)];
                row.extend(opt.settings.iter().map(|&x| fmt_f64(x)));
                row.push(opt.violates().to_string());
                table.rows.push(row);
            }
        }
        records.push(PointRecord {
            index,
            inputs: BTreeMap::from([("n".to_string(), f64::from(n))]),
            outputs,
        });
    }
    Ok(Outcome {
        points: records,
        table,
        summary: json!({}),
        resolved,
        verdict: Some(verdicts.iter().all(|&v| v)),
    })
}

fn run_ghz(cfg: &ScenarioConfig) -> Result<Outcome> {
    let triples: Vec<[f64; 3]> = if cfg.angles.is_none() && cfg.scans.is_empty() {
        CERTIFICATE_ANGLES.to_vec()
    } else {
        angle_points(cfg)
    };
    let tol = cfg.tol.unwrap_or(crate::nonlocality::CERTIFICATE_TOL);
    let mut table = Table::new(&["n", "sigma", "theta", "chi", "closed_form", "enumeration"]);
    let mut records = Vec::new();
    let mut certificates = Vec::new();
    for &n in &cfg.particles {
        let per = u128::from(n / 3 + 1);
        let enumerate = per * per * per * triples.len() as u128 <= u128::from(cfg.max_outcomes);
        let rows: Vec<(f64, Option<f64>)> = triples
            .par_iter()
            .map(|&[a, b, c]| {
                let closed = ghz_correlation_closed_form(n, a, b, c)?;
                let exact = if enumerate {
                    Some(ghz_correlation_exact(n, [a, b, c])?)
                } else {
                    None
                };
                Ok((closed, exact))
            })
            .collect::<Result<_>>()?;
        for (&[a, b, c], (closed, exact)) in triples.iter().zip(rows) {
            table.rows.push(vec![
                n.to_string(),
                fmt_f64(a),
                fmt_f64(b),
                fmt_f64(c),
                fmt_f64(closed),
                exact.map(fmt_f64).unwrap_or_default(),
            ]);
            records.push(PointRecord {
                index: records.len(),
                inputs: BTreeMap::from([
                    ("n".to_string(), f64::from(n)),
                    ("sigma".to_string(), a),
                    ("theta".to_string(), b),
                    ("chi".to_string(), c),
                ]),
                outputs: json!({ "closed_form": closed, "enumeration": exact }),
            });
        }
        let mut cert = ghz_contradiction_certificate(n)?;
        cert.tolerance = tol;
        cert.contradiction = cert.verdict_from_evidence();
        certificates.push(cert);
    }
    let verdict = certificates.iter().all(|c| c.contradiction);
    Ok(Outcome {
        points: records,
        table,
        summary: json!({ "certificates": certificates }),
        resolved: BTreeMap::from([
            ("certificate_tolerance".into(), json!(tol)),
            ("condition".into(), json!("N/3 detections per station")),
        ]),
        verdict: Some(verdict),
    })
}

fn run_hardy(cfg: &ScenarioConfig) -> Result<Outcome> {
    let net = build_hardy_network()?;
    let tol = cfg.tol.unwrap_or(crate::hardy::CERTAINTY_TOL);
    let mut table = Table::new(&["n", "config", "m1", "m2", "m3", "m4", "re", "im", "prob"]);
    let mut records = Vec::new();
    let mut verdicts = Vec::new();
    for (index, &n) in cfg.particles.iter().enumerate() {
        check_cost(4 * composition_count(4, n), cfg.max_outcomes)?;
        for config in HardyConfig::ALL {
            let t = hardy_amplitudes(&net, n, config)?;
            for (m, c) in &t.entries {
                let mut row = vec![n.to_string(), config.label().to_string()];
                row.extend(m.0.iter().map(u32::to_string));
                row.extend([fmt_f64(c.re), fmt_f64(c.im), fmt_f64(c.norm_sqr())]);
                table.rows.push(row);
            }
        }
        let mut cert = impossibility_certificate(&net, n)?;
        cert.certainty_tolerance = tol;
        cert.verdict = cert.verdict_from_evidence();
        verdicts.push(cert.verdict);
        let certainties = certainty_check(&net, n).ok();
        records.push(PointRecord {
            index,
            inputs: BTreeMap::from([("n".to_string(), f64::from(n))]),
            outputs: json!({
                "certificate": cert,
                "certainties": certainties,
                "no_signaling_deviation": no_signaling_deviation(&net, n)?,
            }),
        });
    }
    Ok(Outcome {
        points: records,
        table,
        summary: json!({ "path_phases": net.path_phases, "params": net.params }),
        resolved: BTreeMap::from([
            ("certainty_tolerance".into(), json!(tol)),
            ("zero_tolerance".into(), json!(crate::hardy::HARDY_ZERO_TOL)),
        ]),
        verdict: Some(verdicts.iter().all(|&v| v)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_config;

    fn record(line: &str) -> ResultRecord {
        let cfg = parse_config(std::iter::once("fockbell").chain(line.split_whitespace())).unwrap();
        run(&cfg).unwrap()
    }

    #[test]
    fn bchsh_two() {
        let r = record("bchsh --n 2");
        let q: f64 = r.table.rows[0][2].parse().unwrap();
        let xi: f64 = r.table.rows[0][1].parse().unwrap();
        assert!((q - 2.414).abs() < 1e-3);
        assert!((xi - std::f64::consts::PI / 8.0).abs() < 1e-6);
        assert_eq!(r.verdict, Some(true));
    }

    #[test]
    fn ghz_nine_at_zero() {
        let r = record("ghz --n 9 --angles 0,0,0");
        assert_eq!(r.table.rows.len(), 1);
        let v: f64 = r.table.rows[0][4].parse().unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(r.verdict, Some(true));
    }

    #[test]
    fn empty_distribution() {
        let r = record("dist --n-alpha 0 --n-beta 0");
        assert_eq!(r.table.rows.len(), 1);
        assert_eq!(&r.table.rows[0][3..8], &["0", "0", "0", "0", "1.0000000000000000e0"]);
    }

    #[test]
    fn scan_gives_one_point_per_step() {
        let r = record("compare --scan-zeta 0:pi:8");
        assert_eq!(r.points.len(), 8);
        assert_eq!(r.table.rows.len(), 8 * 10);
    }

    #[test]
    fn cap_refuses_with_estimate() {
        let cfg = parse_config(["fockbell", "dist", "--n", "40", "--max-outcomes", "1000"]).unwrap();
        match run(&cfg) {
            Err(CliError::Validation(Error::TooLarge { estimate, cap })) => {
                assert_eq!(estimate, composition_count(4, 40));
                assert_eq!(cap, 1000);
            }
            other => panic!("{other:?}"),
        }
    }
}
