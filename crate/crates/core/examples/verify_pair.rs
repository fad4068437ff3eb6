//! Certifies quantitative transversality: for every `(delta, epsilon)` in
//! the pair's family, `|P| >= delta` near the boundary of `U` and
//! `|dP| >= epsilon` wherever `|P| < delta`.
//!
//! The product pairs in dimension 3 need the default resolution 512.
//!
//! cargo run --release --example verify_pair -- [resolution]

use randhyp::pairs::{barrier_rescale_check, product_pair, sphere_pair, verify_many, verify_transversality, Family};

fn main() -> randhyp::Result<()> {
    let resolution: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(512);
    for n in 1..=3 {
        let pair = sphere_pair(n)?;
        let family: Vec<_> = pair
            .family()
            .sample(50)
            .into_iter()
            .map(|(d, e)| (d, e * (1.0 - 1e-3)))
            .collect();
        let ws = verify_many(&pair, &family, resolution)?;
        let worst = ws.iter().map(|w| w.worst_margin).fold(f64::INFINITY, f64::min);
        let ok = ws.iter().filter(|w| w.verified).count();
        println!("sphere n={n}: {ok}/{} family members certified, worst margin {worst:.3e}", ws.len());

        for i in 0..n {
            let pair = product_pair(n, i)?;
            let Family::Point { delta, epsilon } = *pair.family() else {
                unreachable!()
            };
            let w = verify_transversality(&pair, delta, 0.99 * epsilon, resolution)?;
            println!(
                "  S^{i}xS^{}: delta {delta:.4} epsilon {:.4} verified {} (boundary {:.3e}, gradient {:.3e})",
                n - 1 - i,
                0.99 * epsilon,
                w.verified,
                w.boundary_margin,
                w.gradient_margin
            );
        }
    }

    // the rescaled barrier sqrt(d)^n P(sqrt(d) y) keeps half the margins
    let pair = sphere_pair(2)?;
    for d in [1, 16, 256] {
        let w = barrier_rescale_check(&pair, d, 0.5, 2.0 * (2f64.sqrt() + 0.5).sqrt(), 128)?;
        println!("barrier d={d}: verified {}", w.verified);
    }
    Ok(())
}
