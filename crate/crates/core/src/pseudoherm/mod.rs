//! Pseudo-Hermitian structures: Levi form, connection, torsion and curvature.

mod connection;
mod flatness;
mod structure;
mod tensor;

pub use connection::{
    comp1_residual, comp2_holds, covariant_along, covariant_derivative, curvature, solve_connection, str2_residual, Certificate,
    Connection, TensorSet,
};
pub use flatness::{flatness_numeric, flatness_of, flatness_test, sup_norms, FlatnessReport};
pub use structure::{characteristic_field, contact_volume, Dir, PHStructure};
pub use tensor::{metric_at, multi_indices, NumTensor, Slot, Tensor};
