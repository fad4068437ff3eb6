//! Expected sup of `|f|^2` and `|f'|^2` over a ball for the one-dimensional
//! Fock field, next to the constant `rho_R` that bounds them.
//!
//! cargo run --release --example sup_norm

use randhyp::constants::rho_r;
use randhyp::lab::{run_sup_norm, ExperimentConfig};

fn main() -> randhyp::Result<()> {
    for radius in [0.01, 0.5, 1.0, 2.0] {
        let r = run_sup_norm(&ExperimentConfig::sup_norm(radius, 1, 1000, 5))?;
        let rho = rho_r(radius, 1)?.value;
        println!(
            "R={radius:<5} E sup|f|^2 = {:>10.4}  E sup|f'|^2 = {:>10.4}  rho_R = {rho}  all bounds hold: {}",
            r.summaries[0].mean,
            r.summaries[1].mean,
            r.all_satisfied()
        );
    }
    Ok(())
}
