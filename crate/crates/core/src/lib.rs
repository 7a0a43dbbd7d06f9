pub mod bands;
pub mod empirical;
pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod kde;
pub mod ks;
pub mod law;
pub mod parallel;
pub mod quadrature;
pub mod rng;
pub mod weights;

pub use error::{Error, Result};
