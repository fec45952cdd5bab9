//! Exterior calculus on the patch `ℂⁿ × ℝ` with exact coefficients.

mod field;
mod form;
pub mod jet;
mod map;

pub use field::VectorField;
pub use form::Form;
pub use jet::{Jet, JetSpace};
pub use map::RationalMap;
