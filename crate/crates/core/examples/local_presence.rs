//! How often a planar Fock field has a closed loop inside the ball of the
//! sphere pair, against the explicit lower bound `m_tau`.
//!
//! cargo run --release --example local_presence -- [samples]

use randhyp::lab::{run_local_presence, ExperimentConfig};
use randhyp::pairs::PairKind;

fn main() -> randhyp::Result<()> {
    let samples: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2000);
    let config = ExperimentConfig::local_presence(PairKind::Sphere, samples, 3, 64);
    let r = run_local_presence(&config)?;
    let s = &r.summaries[0];
    println!("P(loop in ball) = {:.4} +- {:.4} over {} samples", s.mean, s.std_err, s.samples);
    for c in &r.comparisons {
        println!("{}: {} vs {} -> {}", c.name, c.lhs, c.rhs, c.satisfied);
    }
    for n in &r.notes {
        println!("{n}");
    }

    // a ten times smaller ball holds a loop far less often
    let mut small = config.clone();
    small.radius = Some(0.1 * 5f64.sqrt().min((2f64.sqrt() + 2.0).sqrt()));
    let r = run_local_presence(&small)?;
    println!("radius / 10: {:.4}", r.summaries[0].mean);
    Ok(())
}
