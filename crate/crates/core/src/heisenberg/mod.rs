//! Generalized Heisenberg groups `𝓗_P`.

mod congruence;
mod verify;

pub use congruence::{classify_congruence, youla, Congruence, Youla};
pub use verify::ModelCheck;

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{Form, RationalMap, VectorField};
use crate::point::GroupPoint;
use crate::scalar::matrix::{self, QMatrix};
use crate::scalar::{GaussRat, Poly, RatFunc, Ring, Var};

/// Dimension `n` and the constant skew matrix `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    n: usize,
    p: QMatrix,
    ring: Arc<Ring>,
}

/// Validates `P` and builds the model.
pub fn make_model(n: usize, p: QMatrix) -> Result<ModelSpec> {
    if p.len() != n || p.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("P must be {n}x{n}")));
    }
    if !matrix::is_skew(&p) {
        return Err(Error::NotSkew("P^t != -P".into()));
    }
    Ok(ModelSpec { n, p, ring: Ring::base(n) })
}

/// A point with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoint {
    pub z: Vec<GaussRat>,
    pub t: BigRational,
}

impl ExactPoint {
    pub fn origin(n: usize) -> Self {
        Self { z: vec![GaussRat::zero(); n], t: BigRational::zero() }
    }

    pub fn to_point(&self) -> GroupPoint {
        GroupPoint::new(self.z.iter().map(GaussRat::to_complex).collect(), crate::scalar::rat_to_f64(&self.t))
    }
}

impl ModelSpec {
    pub fn heisenberg(n: usize) -> Self {
        make_model(n, matrix::zeros(n)).expect("zero matrix is skew")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> &QMatrix {
        &self.p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_integrable(&self) -> bool {
        self.p.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    pub fn p_numeric(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.p[i][j].to_complex())
    }

    /// Group law of `𝓗_P`.
    pub fn mul(&self, a: &GroupPoint, b: &GroupPoint) -> GroupPoint {
        let mut herm = Complex64::new(0.0, 0.0);
        let mut quad = Complex64::new(0.0, 0.0);
        for al in 0..self.n {
            herm += a.z[al] * b.z[al].conj();
            for be in 0..self.n {
                quad += self.p[al][be].to_complex() * a.z[al] * b.z[be];
            }
        }
        let z = a.z.iter().zip(&b.z).map(|(x, y)| x + y).collect();
        GroupPoint::new(z, a.t + b.t + 2.0 * herm.im - 2.0 * quad.re)
    }

    pub fn inverse(&self, a: &GroupPoint) -> GroupPoint {
        GroupPoint::new(a.z.iter().map(|c| -c).collect(), -a.t)
    }

    pub fn mul_exact(&self, a: &ExactPoint, b: &ExactPoint) -> ExactPoint {
        let mut herm = GaussRat::zero();
        let mut quad = GaussRat::zero();
        for al in 0..self.n {
            herm += &(&a.z[al] * &b.z[al].conj());
            for be in 0..self.n {
                quad += &(&(&self.p[al][be] * &a.z[al]) * &b.z[be]);
            }
        }
        let two = BigRational::from_integer(2.into());
        let z = a.z.iter().zip(&b.z).map(|(x, y)| x + y).collect();
        ExactPoint { z, t: &a.t + &b.t + &two * herm.im - &two * quad.re }
    }

    pub fn inverse_exact(&self, a: &ExactPoint) -> ExactPoint {
        ExactPoint { z: a.z.iter().map(|c| -c).collect(), t: -a.t.clone() }
    }

    /// `K_α = i z̄^α + P_{αβ} z^β`.
    pub fn k_alpha(&self, al: usize) -> Poly {
        let r = &self.ring;
        let mut k = Poly::var(r, Var::Zbar(al)).scale(&GaussRat::i());
        for be in 0..self.n {
            k = &k + &Poly::var(r, Var::Z(be)).scale(&self.p[al][be]);
        }
        k
    }

    /// The canonical frame `Z_α = ∂_{z^α} + K_α ∂_t`.
    pub fn frame(&self) -> Vec<VectorField> {
        (0..self.n)
            .map(|al| {
                let mut c = VectorField::zero(&self.ring).coeffs().to_vec();
                c[Var::Z(al).index(self.n)] = RatFunc::one(&self.ring);
                c[Var::T.index(self.n)] = RatFunc::from_poly(self.k_alpha(al));
                VectorField::from_coeffs(c)
            })
            .collect()
    }

    /// `θ_P = dt + i z^α dz̄^α − i z̄^α dz^α + P_{αβ} z^α dz^β + conj`.
    pub fn contact_form(&self) -> Form {
        let r = &self.ring;
        let n = self.n;
        let mut theta = Form::coordinate(r, Var::T);
        for al in 0..n {
            let iz = RatFunc::from_poly(Poly::var(r, Var::Z(al)).scale(&GaussRat::i()));
            theta = theta.add(&Form::monomial(r, &[Var::Zbar(al).index(n)], iz.clone()));
            theta = theta.add(&Form::monomial(r, &[Var::Z(al).index(n)], iz.conj()));
            for be in 0..n {
                let c = RatFunc::from_poly(Poly::var(r, Var::Z(al)).scale(&self.p[al][be]));
                theta = theta.add(&Form::monomial(r, &[Var::Z(be).index(n)], c.clone()));
                theta = theta.add(&Form::monomial(r, &[Var::Zbar(be).index(n)], c.conj()));
            }
        }
        theta
    }

    /// The admissible coframe `θ^α = dz^α`.
    pub fn coframe(&self) -> Vec<Form> {
        (0..self.n).map(|al| Form::coordinate(&self.ring, Var::Z(al))).collect()
    }

    /// Left translation `L_q(x) = q * x`.
    pub fn left_translation(&self, q: &ExactPoint) -> RationalMap {
        let r = &self.ring;
        let n = self.n;
        let mut herm = Poly::zero(r);
        let mut quad = Poly::zero(r);
        for al in 0..n {
            herm = &herm + &Poly::var(r, Var::Zbar(al)).scale(&q.z[al]);
            for be in 0..n {
                quad = &quad + &Poly::var(r, Var::Z(be)).scale(&(&self.p[al][be] * &q.z[al]));
            }
        }
        let two = GaussRat::from(2);
        let t = &Poly::var(r, Var::T) + &Poly::constant(r, GaussRat::real(q.t.clone()));
        let s = &(&t + &herm.im().scale(&two)) - &quad.re().scale(&two);
        let w = (0..n).map(|al| RatFunc::from_poly(&Poly::var(r, Var::Z(al)) + &Poly::constant(r, q.z[al].clone()))).collect();
        RationalMap::new(n, w, RatFunc::from_poly(s)).expect("polynomial components")
    }

    /// `Λ(z, t) = (λ z, λ² t)`, a dilation with multiplier `μ = λ²`.
    pub fn dilation(&self, lambda: &BigRational) -> Result<RationalMap> {
        if lambda <= &BigRational::zero() {
            return Err(Error::Invalid("dilation scale must be positive".into()));
        }
        let r = &self.ring;
        let l = GaussRat::real(lambda.clone());
        let w = (0..self.n).map(|al| RatFunc::var(r, Var::Z(al)).scale(&l)).collect();
        RationalMap::new(self.n, w, RatFunc::var(r, Var::T).scale(&(&l * &l)))
    }

    /// `D_τ(z, t) = (e^τ z, e^{2τ} t)` with `e^τ` kept as a constant exponential generator.
    pub fn dilation_exp(&self, tau: &BigRational) -> Result<RationalMap> {
        if tau.is_zero() {
            return Ok(RationalMap::identity(&self.ring));
        }
        let f = Poly::constant(&self.ring, GaussRat::real(tau.clone()));
        let ring = Ring::with_generators(self.n, vec![f])?;
        let e = Poly::generator(&ring, 0);
        let w = (0..self.n).map(|al| RatFunc::from_poly(&e * &Poly::var(&ring, Var::Z(al)))).collect();
        RationalMap::new(self.n, w, RatFunc::from_poly(&e.pow(2) * &Poly::var(&ring, Var::T)))
    }

    /// `(z, t) ↦ (U z, t)` for an exactly unitary `U`; `valid` reports `UᵗPU = P`.
    pub fn isotropy(&self, u: &QMatrix) -> Result<Isotropy> {
        if u.len() != self.n || !matrix::is_unitary(u) {
            return Err(Error::NotUnitary("U^H U != I".into()));
        }
        let back = matrix::mul(&matrix::mul(&matrix::transpose(u), &self.p), u);
        let valid = back == self.p;
        let residual = frob(&matrix::to_complex(&matrix::sub(&back, &self.p)));
        Ok(Isotropy { map: self.linear_map(u), valid, residual })
    }

    /// Numeric variant: `U` must be unitary to `1e-10`; its entries enter the
    /// map as exact binary fractions.
    pub fn isotropy_numeric(&self, u: &DMatrix<Complex64>) -> Result<Isotropy> {
        let n = self.n;
        if u.nrows() != n || u.ncols() != n {
            return Err(Error::Dimension("U has the wrong size".into()));
        }
        let defect = (u.adjoint() * u - DMatrix::identity(n, n)).norm();
        if defect > 1e-10 {
            return Err(Error::NotUnitary(format!("||U^H U - I|| = {defect:.3e}")));
        }
        let p = self.p_numeric();
        let residual = (u.transpose() * &p * u - &p).norm();
        let q: QMatrix = (0..n)
            .map(|i| (0..n).map(|j| GaussRat::from_f64_exact(u[(i, j)].re, u[(i, j)].im).expect("finite entry")).collect())
            .collect();
        Ok(Isotropy { map: self.linear_map(&q), valid: residual <= 1e-10, residual })
    }

    fn linear_map(&self, u: &QMatrix) -> RationalMap {
        let r = &self.ring;
        let w = (0..self.n)
            .map(|i| {
                let mut c = Poly::zero(r);
                for j in 0..self.n {
                    c = &c + &Poly::var(r, Var::Z(j)).scale(&u[i][j]);
                }
                RatFunc::from_poly(c)
            })
            .collect();
        RationalMap::new(self.n, w, RatFunc::var(r, Var::T)).expect("linear components")
    }
}

/// Result of [`ModelSpec::isotropy`].
#[derive(Clone, Debug)]
pub struct Isotropy {
    pub map: RationalMap,
    pub valid: bool,
    pub residual: f64,
}

fn frob(a: &[Vec<Complex64>]) -> f64 {
    a.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// `[[0, c], [−c, 0]]`.
pub fn symplectic_block(c: GaussRat) -> QMatrix {
    vec![vec![GaussRat::zero(), c.clone()], vec![-c, GaussRat::zero()]]
}
