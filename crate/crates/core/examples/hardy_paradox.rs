//! Hardy impossibility with three particles per source: both stations can see
//! all their particles at D2 and D3, each station's switch to the primed
//! detectors would then be certain, yet the joint primed event never happens.

use fockbell::hardy::{
    build_hardy_network, exact_hardy_amplitude, hardy_amplitudes, impossibility_certificate, HardyConfig,
};
use fockbell::OccupationVector;

pub fn run() -> fockbell::Result<()> {
    let net = build_hardy_network()?;
    println!("DD transfer matrix:\n{}", net.matrix(HardyConfig::DD));
    let event = OccupationVector::from([0, 3, 3, 0]);
    for config in HardyConfig::ALL {
        let table = hardy_amplitudes(&net, 6, config)?;
        println!("C_{config}(0,3;3,0) = {:.6e}", table.amplitude(&event));
    }
    let exact = exact_hardy_amplitude(HardyConfig::DD, 3, &event)?;
    println!("exact C_DD(0,3;3,0) = {:?}", exact.amplitude());
    for n in [2, 4, 6, 8, 10] {
        let cert = impossibility_certificate(&net, n)?;
        println!(
            "N={n:>2}  P(event)={:.3e}  certainties={:?}  |forbidden|={:.1e}  impossibility: {}",
            cert.nonzero_event_probability, cert.certainties, cert.forbidden_event_amplitude, cert.verdict
        );
    }
    Ok(())
}

fn main() -> fockbell::Result<()> {
    run()
}
