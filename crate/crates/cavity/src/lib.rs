//! Repeated-interaction model of a single-mode cavity crossed by a beam of two-level atoms.

pub mod analytic;
pub mod channels;
pub mod cli;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod special;

pub use error::{CavityError, Result};
pub use linalg::C64;
pub use model::{CavityParams, DensityMatrix, InitialStateSpec};
