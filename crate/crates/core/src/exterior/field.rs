use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::point::GroupPoint;
use crate::scalar::{RatFunc, Ring, Var};

/// A vector field `Σ a_k ∂_k` over the basis `(∂_{z^α}, ∂_{z̄^α}, ∂_t)`.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    n: usize,
    coeffs: Vec<RatFunc>,
}

impl VectorField {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        let n = ring.dim();
        Self { n, coeffs: vec![RatFunc::zero(ring); 2 * n + 1] }
    }

    /// The coordinate field `∂/∂v`.
    pub fn coordinate(ring: &Arc<Ring>, v: Var) -> Self {
        let mut x = Self::zero(ring);
        x.coeffs[v.index(x.n)] = RatFunc::one(ring);
        x
    }

    pub fn from_coeffs(coeffs: Vec<RatFunc>) -> Self {
        assert!(coeffs.len() % 2 == 1, "a field on C^n x R has 2n+1 components");
        let n = coeffs.len() / 2;
        Self { n, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn coeff(&self, v: Var) -> &RatFunc {
        &self.coeffs[v.index(self.n)]
    }

    /// The smallest ring containing every coefficient.
    pub fn ring(&self) -> Arc<Ring> {
        crate::scalar::common_ring(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(RatFunc::is_zero)
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut acc = RatFunc::zero(f.ring());
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let df = f.derive(Var::from_index(k, self.n));
            if !df.is_zero() {
                acc = &acc + &(a * &df);
            }
        }
        acc
    }

    /// `[X, Y]^k = X(Y^k) − Y(X^k)`.
    pub fn bracket(&self, other: &VectorField) -> VectorField {
        let coeffs = (0..self.coeffs.len()).map(|k| &self.apply(&other.coeffs[k]) - &other.apply(&self.coeffs[k])).collect();
        Self { n: self.n, coeffs }
    }

    /// Conjugate field: conjugated coefficients with `∂_z ↔ ∂_z̄`.
    pub fn conj(&self) -> VectorField {
        let n = self.n;
        let coeffs = (0..2 * n + 1)
            .map(|k| {
                let src = Var::from_index(k, n).conj().index(n);
                self.coeffs[src].conj()
            })
            .collect();
        Self { n, coeffs }
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Self { n: self.n, coeffs }
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect();
        Self { n: self.n, coeffs }
    }

    pub fn scale(&self, f: &RatFunc) -> VectorField {
        let coeffs = self.coeffs.iter().map(|a| a * f).collect();
        Self { n: self.n, coeffs }
    }

    pub fn eval(&self, point: &GroupPoint) -> Vec<Complex64> {
        let ring = self.ring();
        let gens = crate::scalar::Poly::generator_values(&ring, point);
        self.coeffs.iter().map(|a| a.lift(&ring).eval(point, &gens)).collect()
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let name = match Var::from_index(k, self.n) {
                Var::Z(a) => format!("d/dz{}", a + 1),
                Var::Zbar(a) => format!("d/dzb{}", a + 1),
                Var::T => "d/dt".into(),
            };
            write!(f, "[{a}]{name}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
