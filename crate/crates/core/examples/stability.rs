//! Small perturbations leave the zero set's topology alone: random
//! polynomials scaled under the certified `(delta, epsilon)` never change
//! the component count.
//!
//! cargo run --release --example stability

use randhyp::ensembles::sample_fock;
use randhyp::pairs::{sphere_pair, stability_check, Family};
use randhyp::Error;

fn main() -> randhyp::Result<()> {
    let pair = sphere_pair(2)?;
    let Family::Curve { offset, .. } = *pair.family() else {
        unreachable!()
    };
    let delta = 0.5;
    let epsilon = 2.0 * (offset - delta).sqrt();
    let (mut unchanged, mut rejected) = (0, 0);
    for seed in 0..40 {
        let g = sample_fock(2, 6, seed)?.to_polynomial().scale(0.004);
        match stability_check(&pair, delta, epsilon, &g, 128) {
            Ok(out) => unchanged += out.unchanged as usize,
            Err(Error::PerturbationTooLarge(_)) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    println!("{unchanged} perturbations kept the topology, {rejected} were outside the hypothesis");
    Ok(())
}
