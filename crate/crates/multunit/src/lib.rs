//! Finite-dimensional multiplicative unitaries as dense complex matrices.

pub mod classify;
pub mod cli;
pub mod bicross;
pub mod coideal;
pub mod error;
pub mod groups;
pub mod mu_core;
pub mod presub;
pub mod tensorlin;

pub use error::{MuError, Result};
