//! Zero-set components: planar pairs in their balls, a Fock sample, and a
//! Kostlan sextic on the projective plane.
//!
//! cargo run --release --example count_components

use randhyp::ensembles::{sample_fock, sample_kostlan};
use randhyp::pairs::{product_pair, sphere_pair, Domain};
use randhyp::poly::CompiledPoly;
use randhyp::zeroset::{grid_components, real_root_count, sphere_components};
use randhyp::MultiPoly;

fn main() -> randhyp::Result<()> {
    for pair in [sphere_pair(2)?, product_pair(2, 0)?, product_pair(2, 1)?] {
        let r = grid_components(&CompiledPoly::new(pair.polynomial()), pair.domain(), 128, 3)?;
        println!("{:?}: {} compact components, confident {}", pair.kind(), r.count, r.confident);
    }

    let f = sample_fock(2, 40, 7)?;
    let r = grid_components(&f, &Domain::ball(2, 2.0), 128, 4)?;
    println!(
        "Fock sample in B(0, 2): {} closed loops, {} arcs through the boundary",
        r.count, r.touching_boundary
    );

    let p = sample_kostlan(2, 6, 3)?;
    let s = sphere_components(&p, 64, 4)?;
    println!(
        "Kostlan sextic: {} ovals on S^2, {} on RP^2 (Harnack bound 11)",
        s.sphere.count, s.projective_count
    );

    // x^3 - x has three real roots; the methods agree
    let cubic = MultiPoly::univariate(&[0.0, -1.0, 0.0, 1.0]);
    println!("x^3 - x: {:?}", real_root_count(&cubic, None)?);
    Ok(())
}
