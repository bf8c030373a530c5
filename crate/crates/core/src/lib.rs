pub mod certifier;
pub mod entropy;
pub mod error;
pub mod harness;
pub mod ingredients;
pub mod matrix;
pub mod measurements;
pub mod rng;
pub mod states;
pub mod tolerances;

pub use error::{Error, Result};
