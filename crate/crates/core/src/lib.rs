pub mod checks;
pub mod cli;
pub mod error;
pub mod jump_sim;
pub mod numerics;
pub mod spectral;
pub mod symbols;

pub use error::{Error, Result};
