pub mod error;
pub mod detschemes;
pub mod gfpoly;
pub mod gradedhom;
pub mod invariants;
pub mod verifier;

pub use error::{Error, Result};
