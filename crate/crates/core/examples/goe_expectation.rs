//! `e_R(i, j)`: expected absolute determinant of a Gaussian symmetric
//! matrix restricted to signature `(i, j)`.
//!
//! cargo run --release --example goe_expectation

use randhyp::constants::{e_r_constant, GOE_CONVENTION};

fn main() -> randhyp::Result<()> {
    println!("{GOE_CONVENTION}\n");
    for (i, j) in [(0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (1, 2), (0, 3)] {
        let e = e_r_constant(i, j, 200_000, 17)?;
        println!("e_R({i}, {j}) = {:.5} +- {:.5}", e.mean, e.std_err);
    }
    println!("\nsize one, exact: 1/(2 sqrt(pi)) = {:.5}", 0.5 / std::f64::consts::PI.sqrt());
    Ok(())
}
