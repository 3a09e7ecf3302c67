//! Cover constructions, metrics and verifiers for asymptotic and transfinite
//! asymptotic dimension, with every quantity an exact integer.

pub mod covers;
pub mod error;
pub mod ordinal;
pub mod spaces;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
