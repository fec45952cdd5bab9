#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod conformal;
pub mod crmaps;
pub mod dynamics;
pub mod error;
pub mod exterior;
pub mod heisenberg;
pub mod json;
pub mod linsolve;
pub mod point;
pub mod pseudoherm;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use point::GroupPoint;
