pub mod arith;
pub mod error;
pub mod multiexp;
pub mod pow;
pub mod rate;
pub mod sim;
pub mod stats;
pub mod vdf;

pub use error::{Error, Result};
