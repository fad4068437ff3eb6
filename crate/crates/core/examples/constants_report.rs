//! The constant chain `rho_R -> tau -> m_tau -> c_Sigma` for the sphere and
//! product pairs, printed in log form since most of it underflows `f64`.
//!
//! cargo run --release --example constants_report

use randhyp::constants::pair_constants;
use randhyp::pairs::{product_pair, sphere_pair};

fn main() -> randhyp::Result<()> {
    println!("{:<14} {:>10} {:>12} {:>10} {:>14}", "pair", "|P|^2", "ln tau", "bound", "ln(-ln c)");
    for n in 1..=6 {
        let mut pairs = vec![(format!("sphere n={n}"), sphere_pair(n)?, 43.0)];
        for i in 0..n {
            pairs.push((format!("S^{i}xS^{} ", n - 1 - i), product_pair(n, i)?, 70.0));
        }
        for (name, pair, k) in pairs {
            let c = pair_constants(&pair)?;
            println!(
                "{name:<14} {:>10.4} {:>12.4} {:>10} {:>14.4}",
                c.fock_norm_sq,
                c.tau.log_magnitude(),
                k * n as f64,
                c.loglog_neg_c
            );
            assert!(c.envelope_bound_ok && c.exp_minus_two_tau_ok);
        }
    }
    let c = pair_constants(&sphere_pair(2)?)?;
    println!("\nsphere n=2 in full:\n{}", serde_json::to_string_pretty(&c).unwrap());
    Ok(())
}
