//! Mean number of real roots of Kostlan binary forms against `sqrt(d)`.
//!
//! cargo run --release --example kostlan_roots -- [samples]

use randhyp::lab::{run_kostlan_roots, ExperimentConfig};

fn main() -> randhyp::Result<()> {
    let samples: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10_000);
    println!("{:>5} {:>10} {:>10} {:>9}", "d", "mean", "std err", "sqrt(d)");
    for d in [1, 2, 4, 10, 30, 100] {
        let r = run_kostlan_roots(&ExperimentConfig::kostlan_roots(d, samples, 2024))?;
        let s = &r.summaries[0];
        println!("{d:>5} {:>10.4} {:>10.4} {:>9.4}", s.mean, s.std_err, (d as f64).sqrt());
    }
    Ok(())
}
