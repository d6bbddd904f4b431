//! Large neighbourhood search for the two-echelon vehicle routing problem
//! and the two-echelon location routing problem with a single depot.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod bench;
pub mod destroy_repair;
pub mod error;
pub mod instance;
pub mod lns;
pub mod local_search;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod solution;

pub use error::{Error, Result};
pub use lns::{solve, RunReport};
pub use params::Params;
pub use scalar::Scalar;

pub type Instance = instance::Instance<f64>;
pub type Solution = solution::Solution<f64>;
