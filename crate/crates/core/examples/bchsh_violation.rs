//! Largest BCHSH value of the parity correlation `cos^N((ζ+θ)/2)` with the
//! chained settings, as the condensates grow.

use fockbell::nonlocality::{maximize_bchsh, write_qmax_table, ViolationReport};

pub fn run() -> fockbell::Result<()> {
    let sizes = [2u64, 4, 6, 10, 20, 50, 100, 1000, 1_000_000];
    let optima: Vec<_> = sizes.iter().map(|&n| maximize_bchsh(n)).collect();
    write_qmax_table(std::io::stdout().lock(), &optima)?;
    for o in &optima {
        assert!(o.violates());
    }
    let report = ViolationReport::from_bchsh(&optima[0]);
    println!("{}", serde_json::to_string_pretty(&report.to_tree())?);
    Ok(())
}

fn main() -> fockbell::Result<()> {
    run()
}
