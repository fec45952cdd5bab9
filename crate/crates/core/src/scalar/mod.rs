//! Exact coefficient field: Gaussian rationals, polynomials with exponential
//! generators and their fractions.

mod gaussrat;
pub mod matrix;
pub mod poly;
pub mod ratfunc;

pub use gaussrat::{rat_from_decimal, rat_to_f64, GaussRat};
pub use poly::{Monomial, Poly, Ring, Var};
pub use ratfunc::RatFunc;

use std::sync::Arc;

/// The largest of the rings of `items`; they must be pairwise compatible.
pub fn common_ring(items: &[RatFunc]) -> Arc<Ring> {
    let mut it = items.iter();
    let mut r = it.next().expect("at least one fraction").ring().clone();
    for x in it {
        r = Ring::join(&r, x.ring()).expect("incompatible rings");
    }
    r
}
