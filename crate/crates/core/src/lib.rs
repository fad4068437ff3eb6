//! Explicit lower-bound constants for the expected Betti numbers of random
//! real hypersurfaces, and Monte Carlo checks of the probabilistic
//! statements behind them on the Kostlan and Bargmann-Fock ensembles.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: sparse multivariate polynomials and their Fock norm;
//! * [`constants`]: `m_tau`, `rho_R`, `tau_(U,P)`, `c_Sigma` and `e_R`;
//! * [`pairs`]: regular pairs, transversality certificates, stability;
//! * [`ensembles`]: seeded Kostlan and Fock samplers;
//! * [`zeroset`]: root counts and zero-set components;
//! * [`lab`]: reproducible experiments and their reports.

pub mod constants;
pub mod ensembles;
pub mod error;
pub mod lab;
pub mod logreal;
pub mod optimize;
pub mod pairs;
pub mod poly;
pub mod rng;
pub mod zeroset;

pub use error::{Error, Result};
pub use logreal::LogReal;
pub use poly::{MultiIndex, MultiPoly};
