//! Quantum statistics against condensates with a hidden, pre-existing
//! relative phase. The station totals agree; the detector-resolved outcomes
//! do not.

use std::f64::consts::FRAC_PI_2;

use fockbell::fock::SourceSpec;
use fockbell::optics::AngleSettings;
use fockbell::phase::{compare_models, QuadratureGrid};

pub fn run() -> fockbell::Result<()> {
    for pops in [[1u32, 1], [2, 2], [3, 1]] {
        let s = SourceSpec::new(pops);
        let grid = QuadratureGrid::for_particles(s.total());
        let report = compare_models(&s, &AngleSettings::two(FRAC_PI_2, FRAC_PI_2), &grid)?;
        println!("populations {pops:?}: total variation {:.4}", report.total_variation);
        let mut worst = report.rows.clone();
        worst.sort_by(|a, b| b.divergence.abs().total_cmp(&a.divergence.abs()));
        for r in worst.iter().take(3) {
            println!(
                "  {}  quantum {:.5}  classical {:.5}",
                r.outcome, r.p_quantum, r.p_classical
            );
        }
    }
    Ok(())
}

fn main() -> fockbell::Result<()> {
    run()
}
