//! Few-shot clause span retrieval in contracts.

pub mod corpus;
mod error;
pub mod eval;
pub mod linalg;
pub mod retrieve;
mod scalar;
pub mod score;
pub mod segment;
pub mod transform;
pub mod vectorize;

pub use error::{Error, Result};
pub use scalar::Real;

/// Scalar used by the command-line tool.
pub type Scalar = f32;
