use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::error::Error;

/// Enumerated outcomes allowed before a run is refused.
pub const DEFAULT_MAX_OUTCOMES: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Outcome distribution of the two-source interferometer or the ring.
    Dist,
    /// BCHSH optimum per particle number.
    Bchsh,
    /// Three-station parity products and the sign certificate.
    Ghz,
    /// Hardy amplitudes and the impossibility certificate.
    Hardy,
    /// Quantum statistics against a pre-existing relative phase.
    Compare,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Dist => "dist",
            Scenario::Bchsh => "bchsh",
            Scenario::Ghz => "ghz",
            Scenario::Hardy => "hardy",
            Scenario::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Tree,
}

/// Parse an angle: a number, or a multiple of `pi` such as `pi/2`,
/// `-3pi/4` or `0.5pi`.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s = text.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let Some(pos) = s.find("pi") else {
        return Err(format!("cannot read angle '{text}'"));
    };
    let (head, tail) = (s[..pos].trim().trim_end_matches('*'), &s[pos + 2..]);
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("cannot read angle '{text}'"))?,
    };
    let div = match tail.trim() {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.trim().parse::<f64>().ok())
            .ok_or_else(|| format!("cannot read angle '{text}'"))?,
    };
    Ok(coef * PI / div)
}

/// `start:stop:steps`, inclusive of both ends when `steps > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl ScanRange {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        (0..self.steps)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

impl FromStr for ScanRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("scan '{s}' is not start:stop:steps"));
        }
        let steps: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| format!("scan steps '{}' is not a count", parts[2]))?;
        if steps == 0 {
            return Err("scan steps must be at least 1".into());
        }
        Ok(Self {
            start: parse_angle(parts[0])?,
            stop: parse_angle(parts[1])?,
            steps,
        })
    }
}

impl fmt::Display for ScanRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanAxis {
    Zeta,
    Theta,
    Chi,
    Xi,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::Zeta => "zeta",
            ScanAxis::Theta => "theta",
            ScanAxis::Chi => "chi",
            ScanAxis::Xi => "xi",
        }
    }
}

/// Command-line flags.
#[derive(Debug, Clone, Parser)]
#[command(name = "fockbell", version, about = "Fock-state condensate interferometry")]
#[command(allow_negative_numbers = true)]
pub struct Args {
    /// Scenario to run (same as --scenario).
    #[arg(value_enum, value_name = "SCENARIO")]
    pub scenario_positional: Option<Scenario>,
    #[arg(long, value_enum)]
    pub scenario: Option<Scenario>,
    /// Total particle numbers, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    #[arg(long)]
    pub n_alpha: Option<u32>,
    #[arg(long)]
    pub n_beta: Option<u32>,
    #[arg(long)]
    pub n_gamma: Option<u32>,
    #[arg(long, value_parser = parse_angle)]
    pub zeta: Option<f64>,
    #[arg(long, value_parser = parse_angle)]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_angle)]
    pub chi: Option<f64>,
    /// All station angles at once, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_angle)]
    pub angles: Vec<f64>,
    #[arg(long, value_name = "START:STOP:STEPS")]
    pub scan_zeta: Option<ScanRange>,
    #[arg(long, value_name = "START:STOP:STEPS")]
    pub scan_theta: Option<ScanRange>,
    #[arg(long, value_name = "START:STOP:STEPS")]
    pub scan_chi: Option<ScanRange>,
    /// BCHSH angle ξ (bchsh only).
    #[arg(long, value_name = "START:STOP:STEPS")]
    pub scan_xi: Option<ScanRange>,
    /// Number of recorded particles (compare, bchsh).
    #[arg(long)]
    pub m_measured: Option<u32>,
    /// Quadrature nodes per phase variable (default 4N + 4).
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    /// Certificate tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seeded draws from each distribution (dist).
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Exit with status 4 unless the verdict matches.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub expect_violation: Option<bool>,
    /// Refuse runs that enumerate more outcomes than this.
    #[arg(long)]
    pub max_outcomes: Option<u64>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// One source of settings; every field optional so layers can be merged.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigLayer {
    pub scenario: Option<Scenario>,
    pub n: Option<Vec<u32>>,
    pub n_alpha: Option<u32>,
    pub n_beta: Option<u32>,
    pub n_gamma: Option<u32>,
    pub zeta: Option<f64>,
    pub theta: Option<f64>,
    pub chi: Option<f64>,
    pub angles: Option<Vec<f64>>,
    pub scan_zeta: Option<String>,
    pub scan_theta: Option<String>,
    pub scan_chi: Option<String>,
    pub scan_xi: Option<String>,
    pub m_measured: Option<u32>,
    pub quad_nodes: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub expect_violation: Option<bool>,
    pub max_outcomes: Option<u64>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    fn from_args(a: &Args) -> Result<Self, CliError> {
        let scenario = match (a.scenario_positional, a.scenario) {
            (Some(p), Some(f)) if p != f => {
                return Err(CliError::Usage(format!(
                    "scenario given twice: {} and {}",
                    p.name(),
                    f.name()
                )))
            }
            (p, f) => p.or(f),
        };
        let scan = |r: &Option<ScanRange>| r.map(|r| r.to_string());
        Ok(Self {
            scenario,
            n: (!a.n.is_empty()).then(|| a.n.clone()),
            n_alpha: a.n_alpha,
            n_beta: a.n_beta,
            n_gamma: a.n_gamma,
            zeta: a.zeta,
            theta: a.theta,
            chi: a.chi,
            angles: (!a.angles.is_empty()).then(|| a.angles.clone()),
            scan_zeta: scan(&a.scan_zeta),
            scan_theta: scan(&a.scan_theta),
            scan_chi: scan(&a.scan_chi),
            scan_xi: scan(&a.scan_xi),
            m_measured: a.m_measured,
            quad_nodes: a.quad_nodes,
            tol: a.tol,
            seed: a.seed,
            samples: a.samples,
            output: a.output.clone(),
            format: a.format,
            expect_violation: a.expect_violation,
            max_outcomes: a.max_outcomes,
        })
    }

    /// Field-wise: values of `self` win over `base`.
    pub fn over(self, base: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            scenario: self.scenario.or(base.scenario),
            n: self.n.or(base.n),
            n_alpha: self.n_alpha.or(base.n_alpha),
            n_beta: self.n_beta.or(base.n_beta),
            n_gamma: self.n_gamma.or(base.n_gamma),
            zeta: self.zeta.or(base.zeta),
            theta: self.theta.or(base.theta),
            chi: self.chi.or(base.chi),
            angles: self.angles.or(base.angles),
            scan_zeta: self.scan_zeta.or(base.scan_zeta),
            scan_theta: self.scan_theta.or(base.scan_theta),
            scan_chi: self.scan_chi.or(base.scan_chi),
            scan_xi: self.scan_xi.or(base.scan_xi),
            m_measured: self.m_measured.or(base.m_measured),
            quad_nodes: self.quad_nodes.or(base.quad_nodes),
            tol: self.tol.or(base.tol),
            seed: self.seed.or(base.seed),
            samples: self.samples.or(base.samples),
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            expect_violation: self.expect_violation.or(base.expect_violation),
            max_outcomes: self.max_outcomes.or(base.max_outcomes),
        }
    }
}

/// Fully resolved settings of one run. Everything here is echoed into the
/// result record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Total particle numbers (bchsh, ghz, hardy).
    pub particles: Vec<u32>,
    /// Source populations (dist, compare).
    pub populations: Vec<u32>,
    /// Fixed angles `(ζ, θ, χ)`, zero where unset; `None` when no angle was
    /// given at all.
    pub angles: Option<[f64; 3]>,
    pub scans: BTreeMap<ScanAxis, ScanRange>,
    pub m_measured: Option<u32>,
    pub quad_nodes: Option<usize>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub expect_violation: Option<bool>,
    pub max_outcomes: u64,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl ScenarioConfig {
    /// Validate a merged layer and fill in the defaults.
    pub fn resolve(layer: ConfigLayer) -> Result<Self, CliError> {
        let scenario = layer.scenario.ok_or_else(|| usage("missing scenario"))?;
        let mut scans = BTreeMap::new();
        for (axis, text) in [
            (ScanAxis::Zeta, &layer.scan_zeta),
            (ScanAxis::Theta, &layer.scan_theta),
            (ScanAxis::Chi, &layer.scan_chi),
            (ScanAxis::Xi, &layer.scan_xi),
        ] {
            if let Some(t) = text {
                let range: ScanRange = t
                    .parse()
                    .map_err(|e| usage(format!("scan-{}: {e}", axis.name())))?;
                scans.insert(axis, range);
            }
        }
        let point = [layer.zeta, layer.theta, layer.chi];
        if layer.angles.is_some() && point.iter().any(Option::is_some) {
            return Err(usage("angles conflicts with zeta/theta/chi"));
        }
        let mut angles = [0.0; 3];
        if let Some(list) = &layer.angles {
            if list.is_empty() || list.len() > 3 {
                return Err(usage("angles takes 2 or 3 values"));
            }
            angles[..list.len()].copy_from_slice(list);
        }
        for (k, (axis, value)) in [ScanAxis::Zeta, ScanAxis::Theta, ScanAxis::Chi]
            .into_iter()
            .zip(point)
            .enumerate()
        {
            if let Some(v) = value {
                angles[k] = v;
            }
            if scans.contains_key(&axis) && (value.is_some() || layer.angles.is_some()) {
                return Err(usage(format!(
                    "scan-{0} conflicts with a fixed {0}",
                    axis.name()
                )));
            }
        }
        if scans.contains_key(&ScanAxis::Xi) && scenario != Scenario::Bchsh {
            return Err(usage("scan-xi applies to bchsh only"));
        }
        if let Some(t) = layer.tol {
            if !(t > 0.0) {
                return Err(usage("tol must be positive"));
            }
        }
        if layer.quad_nodes == Some(0) {
            return Err(usage("quad-nodes must be at least 1"));
        }
        let populations = resolve_populations(scenario, &layer)?;
        let particles = resolve_particles(scenario, &layer)?;
        match scenario {
            Scenario::Hardy if !scans.is_empty() || layer.angles.is_some() || point.iter().any(Option::is_some) => {
                return Err(usage("hardy takes no angles"))
            }
            Scenario::Bchsh
                if scans.keys().any(|&a| a != ScanAxis::Xi)
                    || layer.angles.is_some()
                    || point.iter().any(Option::is_some) =>
            {
                return Err(usage("bchsh takes no station angles; use scan-xi"))
            }
            _ => {}
        }
        let any_angle = layer.angles.is_some() || point.iter().any(Option::is_some);
        Ok(Self {
            scenario,
            particles,
            populations,
            angles: any_angle.then_some(angles),
            scans,
            m_measured: layer.m_measured,
            quad_nodes: layer.quad_nodes,
            tol: layer.tol,
            seed: layer.seed.unwrap_or(0),
            samples: layer.samples.unwrap_or(0),
            output: layer.output,
            format: layer.format.unwrap_or_default(),
            expect_violation: layer.expect_violation,
            max_outcomes: layer.max_outcomes.unwrap_or(DEFAULT_MAX_OUTCOMES),
        })
    }
}

fn resolve_populations(scenario: Scenario, layer: &ConfigLayer) -> Result<Vec<u32>, CliError> {
    let explicit = [layer.n_alpha, layer.n_beta, layer.n_gamma];
    let any_explicit = explicit.iter().any(Option::is_some);
    match scenario {
        Scenario::Dist | Scenario::Compare => {
            if layer.n.is_some() && any_explicit {
                return Err(usage("n conflicts with n-alpha/n-beta/n-gamma"));
            }
            if let Some(list) = &layer.n {
                let &[total] = list.as_slice() else {
                    return Err(usage(format!("{} takes a single n", scenario.name())));
                };
                if total % 2 != 0 {
                    return Err(usage("n must be even to split equally between two sources"));
                }
                return Ok(vec![total / 2, total / 2]);
            }
            let mut pops = vec![layer.n_alpha.unwrap_or(1), layer.n_beta.unwrap_or(1)];
            if let Some(g) = layer.n_gamma {
                if scenario == Scenario::Compare {
                    return Err(usage("compare uses two sources"));
                }
                pops.push(g);
            }
            Ok(pops)
        }
        Scenario::Ghz => {
            let given: Vec<u32> = explicit.iter().flatten().copied().collect();
            if given.windows(2).any(|w| w[0] != w[1]) {
                return Err(usage("ghz requires three equal populations"));
            }
            Ok(Vec::new())
        }
        _ => Ok(Vec::new()),
    }
}

fn resolve_particles(scenario: Scenario, layer: &ConfigLayer) -> Result<Vec<u32>, CliError> {
    let explicit: Vec<u32> = [layer.n_alpha, layer.n_beta, layer.n_gamma]
        .iter()
        .flatten()
        .copied()
        .collect();
    let from_populations = |sources: usize| -> Option<u32> {
        (!explicit.is_empty()).then(|| explicit[0] * sources as u32)
    };
    let list = match scenario {
        Scenario::Dist | Scenario::Compare => return Ok(Vec::new()),
        Scenario::Bchsh => {
            if explicit.len() == 2 && explicit[0] != explicit[1] {
                return Err(usage("bchsh needs equal populations"));
            }
            layer.n.clone().or_else(|| from_populations(2).map(|n| vec![n])).unwrap_or(vec![2])
        }
        Scenario::Ghz => layer.n.clone().or_else(|| from_populations(3).map(|n| vec![n])).unwrap_or(vec![3]),
        Scenario::Hardy => layer.n.clone().or_else(|| from_populations(2).map(|n| vec![n])).unwrap_or(vec![6]),
    };
    if layer.n.is_some() && !explicit.is_empty() {
        return Err(usage("n conflicts with n-alpha/n-beta/n-gamma"));
    }
    for &n in &list {
        let ok = match scenario {
            Scenario::Bchsh => n >= 2 && n % 2 == 0,
            Scenario::Ghz => n > 0 && n % 3 == 0,
            Scenario::Hardy => n % 2 == 0,
            _ => true,
        };
        if !ok {
            return Err(usage(format!("n = {n} is not valid for {}", scenario.name())));
        }
    }
    Ok(list)
}

/// Parse flags (the first item is the program name), merge an optional
/// `--config` file underneath, and resolve defaults.
pub fn parse_config<I, S>(args: I) -> Result<ScenarioConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let parsed = Args::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError::Info(e.render().to_string())
        }
        _ => CliError::Usage(e.render().to_string()),
    })?;
    let flags = ConfigLayer::from_args(&parsed)?;
    let file = match &parsed.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(Error::from)?;
            ConfigLayer::from_toml(&text)?
        }
        None => ConfigLayer::default(),
    };
    ScenarioConfig::resolve(flags.over(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> Result<ScenarioConfig, CliError> {
        parse_config(std::iter::once("fockbell").chain(line.split_whitespace()))
    }

    #[test]
    fn angles_accept_pi_multiples() {
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!((parse_angle("pi/2").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((parse_angle("-3pi/4").unwrap() + 0.75 * PI).abs() < 1e-15);
        assert!((parse_angle("2*pi").unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!(parse_angle("pie").is_err());
    }

    #[test]
    fn scan_ranges() {
        let r: ScanRange = "0:pi:8".parse().unwrap();
        let p = r.points();
        assert_eq!(p.len(), 8);
        assert_eq!(p[0], 0.0);
        assert!((p[7] - PI).abs() < 1e-15);
        assert!("0:1:0".parse::<ScanRange>().is_err());
        assert!("0:1".parse::<ScanRange>().is_err());
    }

    #[test]
    fn missing_scenario_is_usage() {
        let err = parse("--n 4").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn positional_and_flag_scenarios() {
        assert_eq!(parse("ghz").unwrap().scenario, Scenario::Ghz);
        assert_eq!(parse("--scenario hardy").unwrap().scenario, Scenario::Hardy);
        assert!(parse("ghz --scenario hardy").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "scenario = \"bchsh\"\nn = [4]\nseed = 9\n").unwrap();
        let cfg = parse(&format!("--config {} --n 6", path.display())).unwrap();
        assert_eq!(cfg.particles, vec![6]);
        assert_eq!(cfg.seed, 9);
        let only_file = parse(&format!("--config {}", path.display())).unwrap();
        assert_eq!(only_file.particles, vec![4]);
    }

    #[test]
    fn unknown_file_key_is_usage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "scenario = \"dist\"\nzetta = 1.0\n").unwrap();
        let err = parse(&format!("--config {}", path.display())).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn scan_and_point_conflict() {
        assert!(parse("dist --zeta 0.1 --scan-zeta 0:1:4").is_err());
        assert!(parse("dist --angles 0,0 --zeta 1").is_err());
        let cfg = parse("dist --scan-zeta 0:1:8 --theta -0.5").unwrap();
        assert_eq!(cfg.scans[&ScanAxis::Zeta].steps, 8);
        assert_eq!(cfg.angles, Some([0.0, -0.5, 0.0]));
        assert_eq!(parse("ghz").unwrap().angles, None);
    }

    #[test]
    fn population_rules() {
        assert_eq!(parse("dist --n-alpha 0 --n-beta 0").unwrap().populations, vec![0, 0]);
        assert_eq!(parse("dist --n 6").unwrap().populations, vec![3, 3]);
        assert!(parse("ghz --n-alpha 2 --n-beta 3").is_err());
        assert_eq!(parse("ghz --n-alpha 3").unwrap().particles, vec![9]);
        assert!(parse("ghz --n 4").is_err());
        assert!(parse("hardy --n 5").is_err());
        assert!(parse("compare --n-gamma 1").is_err());
    }

    #[test]
    fn defaults_are_filled() {
        let cfg = parse("bchsh").unwrap();
        assert_eq!(cfg.particles, vec![2]);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.max_outcomes, DEFAULT_MAX_OUTCOMES);
        assert!(parse("bchsh --tol 0").is_err());
        assert!(parse("bchsh --n 3").is_err());
    }
}
