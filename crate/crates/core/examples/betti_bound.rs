//! Lower bounds for `liminf E(b_i) / sqrt(d)^n`, summed over the catalog of
//! spheres and sphere products, and the packing counts that turn a local
//! probability into a global count.
//!
//! cargo run --release --example betti_bound

use randhyp::lab::{betti_lower_bound_report, packing_count};

fn main() -> randhyp::Result<()> {
    for n in 1..=4 {
        for i in 0..n {
            let r = betti_lower_bound_report(n, i)?;
            let terms: Vec<String> = r.catalog.iter().map(|t| format!("{} x b={}", t.surface, t.betti)).collect();
            println!("n={n} i={i}: {} [{}] holds: {}", r.comparisons[0].lhs, terms.join(", "), r.all_satisfied());
        }
    }
    let radius = (2f64.sqrt() + 2.0).sqrt();
    for d in [16, 64, 256, 1024] {
        println!("RP^2 (area 2), R = {radius:.4}, d = {d}: {} disjoint balls", packing_count(2, radius, d, 2.0)?);
    }
    Ok(())
}
