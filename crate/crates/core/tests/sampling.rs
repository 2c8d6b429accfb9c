use fockbell::fock::sample_outcomes;
use fockbell::optics::two_source_interferometer;
use fockbell::{distribution, SourceSpec};

#[test]
fn frequencies_within_three_sigma() {
    let dist = distribution(&two_source_interferometer(0.7, -0.3), &SourceSpec::new([2, 2])).unwrap();
    let n = 100_000;
    let draws = sample_outcomes(&dist, n, 2024).unwrap();
    assert_eq!(draws.len(), n);
    let mut counts = std::collections::BTreeMap::new();
    for d in draws {
        *counts.entry(d).or_insert(0usize) += 1;
    }
    for (m, p) in dist.iter() {
        let seen = counts.get(m).copied().unwrap_or(0) as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((seen - p).abs() <= 3.0 * sigma + 1e-12, "{m}: {seen} vs {p} (σ = {sigma})");
    }
}

#[test]
fn same_seed_same_draws() {
    let dist = distribution(&two_source_interferometer(0.1, 0.2), &SourceSpec::new([1, 2])).unwrap();
    assert_eq!(sample_outcomes(&dist, 500, 9).unwrap(), sample_outcomes(&dist, 500, 9).unwrap());
    assert!(sample_outcomes(&dist, 0, 9).unwrap().is_empty());
}
