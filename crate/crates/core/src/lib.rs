//! Quasi-Monte Carlo toolkit: low-discrepancy point sets, Sobol' sequences
//! with randomization, exact and heuristic star discrepancy, point-set
//! refinement, and a randomized-QMC option-pricing benchmark.

pub mod bench;
pub mod discrepancy;
pub mod error;
pub mod finance;
pub mod generators;
pub mod optimizer;
mod par;
pub mod pointset;
pub mod seed;
pub mod sobol;

pub use error::{Error, Result};
pub use pointset::{load_point_set, save_point_set, PointSet};
