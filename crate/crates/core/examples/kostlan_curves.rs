//! Components of random Kostlan curves in the projective plane and the
//! ratio `E(b0)/d`, whose behaviour for large `d` is the exploratory trend.
//!
//! cargo run --release --example kostlan_curves -- [samples]

use randhyp::lab::{run_kostlan_curves, ExperimentConfig};

fn main() -> randhyp::Result<()> {
    let samples: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let degrees = [2, 4, 8, 12, 16];
    let r = run_kostlan_curves(&ExperimentConfig::kostlan_curves(&degrees, samples, 11, 64))?;
    for (s, d) in r.summaries.iter().zip(degrees) {
        println!("d={d:>3}  E(b0) = {:.3} +- {:.3}  E(b0)/d = {:.4}", s.mean, s.std_err, s.mean / d as f64);
    }
    for c in &r.comparisons {
        println!("{}: {} ({})", c.name, c.satisfied, c.lhs);
    }
    println!("excluded ambiguous samples: {}", r.excluded);
    Ok(())
}
