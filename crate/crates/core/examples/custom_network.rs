//! Describe an interferometer in TOML, compose it, and read off Fock
//! statistics. Here a Mach–Zehnder with two photons in one port and one in
//! the other.

use fockbell::fock::{distribution, SourceSpec};
use fockbell::optics::NetworkDoc;

const MACH_ZEHNDER: &str = r#"
[[modes]]
index = 0
label = "upper"

[[modes]]
index = 1
label = "lower"

[[elements]]
kind = "beamsplitter"
modes = [0, 1]
r = 0.7071067811865476

[[elements]]
kind = "phase-shifter"
modes = [1]
phase = 0.8

[[elements]]
kind = "mirror"
modes = [0]

[[elements]]
kind = "beamsplitter"
modes = [0, 1]
t = 0.7071067811865476

[[sources]]
index = 0
label = "a"

[[sources]]
index = 1
label = "b"

[[detectors]]
index = 0
label = "top"

[[detectors]]
index = 1
label = "bottom"
"#;

pub fn run() -> fockbell::Result<()> {
    let doc = NetworkDoc::from_toml(MACH_ZEHNDER)?;
    let u = doc.to_network()?.compose()?;
    println!("{u}");
    let dist = distribution(&u, &SourceSpec::new([2, 1]))?;
    let labels: Vec<String> = u.detector_labels.clone();
    dist.write_csv(std::io::stdout().lock(), &labels)?;
    println!("canonical form:\n{}", doc.to_network().map(|n| NetworkDoc::from_network(&n))?.to_toml()?);
    Ok(())
}

fn main() -> fockbell::Result<()> {
    run()
}
