//! One particle from each condensate: the coincidence probability at D2 and
//! D4 follows a full-visibility fringe in the sum of the station angles.
//!
//! ```text
//! cargo run --example two_particle_interference
//! ```

use fockbell::fock::{distribution, SourceSpec};
use fockbell::optics::{two_source_interferometer, AngleSettings};
use fockbell::phase::{probability_quadrature, QuadratureGrid};
use fockbell::OccupationVector;

pub fn run() -> fockbell::Result<()> {
    let s = SourceSpec::new([1, 1]);
    let m = OccupationVector::from([0, 1, 0, 1]);
    let grid = QuadratureGrid::for_particles(2);
    println!("{:>8} {:>12} {:>12} {:>12}", "zeta+th", "engine", "phase", "cos^2/4");
    for k in 0..=8 {
        let sum = std::f64::consts::PI * k as f64 / 4.0;
        let (zeta, theta) = (0.3 * sum, 0.7 * sum);
        let engine = distribution(&two_source_interferometer(zeta, theta), &s)?.probability(&m);
        let phase = probability_quadrature(&s, &AngleSettings::two(zeta, theta), &m, &grid)?;
        let want = 0.25 * (sum / 2.0).cos().powi(2);
        println!("{sum:>8.4} {engine:>12.9} {phase:>12.9} {want:>12.9}");
        assert!((engine - want).abs() < 1e-12 && (phase - want).abs() < 1e-12);
    }
    Ok(())
}

fn main() -> fockbell::Result<()> {
    run()
}
