use std::sync::Arc;

use num_complex::Complex64;

use super::jet::{Jet, JetSpace};
use super::{Form, VectorField};
use crate::error::{Error, Result};
use crate::point::GroupPoint;
use crate::scalar::{common_ring, GaussRat, Poly, RatFunc, Ring, Var};

/// A map `(z, t) ↦ (w(z, z̄, t), s(z, z̄, t))` between coordinate patches.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    n_src: usize,
    w: Vec<RatFunc>,
    s: RatFunc,
}

impl RationalMap {
    pub fn new(n_src: usize, w: Vec<RatFunc>, s: RatFunc) -> Result<Self> {
        for c in w.iter().chain(std::iter::once(&s)) {
            if c.dim() != n_src {
                return Err(Error::Dimension(format!("component lives on a patch of dimension {}, expected {n_src}", c.dim())));
            }
            if c.denom().is_zero() {
                return Err(Error::DivisionByZero);
            }
        }
        Ok(Self { n_src, w, s })
    }

    pub fn identity(ring: &Arc<Ring>) -> Self {
        let n = ring.dim();
        let w = (0..n).map(|a| RatFunc::var(ring, Var::Z(a))).collect();
        Self { n_src: n, w, s: RatFunc::var(ring, Var::T) }
    }

    pub fn n_src(&self) -> usize {
        self.n_src
    }

    pub fn n_dst(&self) -> usize {
        self.w.len()
    }

    pub fn w(&self) -> &[RatFunc] {
        &self.w
    }

    pub fn s(&self) -> &RatFunc {
        &self.s
    }

    pub fn ring(&self) -> Arc<Ring> {
        let mut all = self.w.clone();
        all.push(self.s.clone());
        common_ring(&all)
    }

    /// Target coordinate functions in the order `(w, w̄, s)`.
    pub fn components(&self) -> Vec<RatFunc> {
        let mut out = self.w.clone();
        out.extend(self.w.iter().map(RatFunc::conj));
        out.push(self.s.clone());
        out
    }

    /// Numeric image of a point; `s` is taken as its real part.
    pub fn apply(&self, x: &GroupPoint) -> Result<GroupPoint> {
        let ring = self.ring();
        let gens = Poly::generator_values(&ring, x);
        let mut z = Vec::with_capacity(self.w.len());
        for c in &self.w {
            z.push(c.lift(&ring).eval_checked(x, &gens)?);
        }
        let t = self.s.lift(&ring).eval_checked(x, &gens)?.re;
        Ok(GroupPoint::new(z, t))
    }

    /// `f ∘ F` for a fraction on the target patch.
    pub fn compose_ratfunc(&self, f: &RatFunc) -> Result<RatFunc> {
        let num = self.compose_poly(f.numer())?;
        let den = self.compose_poly(f.denom())?;
        if den.is_zero() {
            return Err(Error::Pole("denominator vanishes identically after substitution".into()));
        }
        num.checked_div(&den)
    }

    /// `p ∘ F`. Target generators `e^{f_j}` become source generators `e^{f_j∘F}`.
    pub fn compose_poly(&self, p: &Poly) -> Result<RatFunc> {
        if p.dim() != self.n_dst() {
            return Err(Error::Dimension(format!(
                "function on dimension {} composed with a map into dimension {}",
                p.dim(),
                self.n_dst()
            )));
        }
        let mut ring = self.ring();
        let mut slots: Vec<Option<usize>> = Vec::new();
        for f in p.ring().generators() {
            let g = self.compose_poly(f)?;
            let g = g
                .as_poly()
                .and_then(|q| q.drop_generators())
                .ok_or_else(|| Error::InvalidGenerator("exponent does not pull back to a polynomial".into()))?;
            if g.is_zero() {
                slots.push(None);
                continue;
            }
            let (r, j) = ring.extend(g)?;
            ring = r;
            slots.push(Some(j));
        }
        let comps: Vec<RatFunc> = self.components().iter().map(|c| c.lift(&ring)).collect();
        let one = RatFunc::one(&ring);
        let gens: Vec<RatFunc> = slots
            .iter()
            .map(|s| match s {
                Some(j) => RatFunc::from_poly(Poly::generator(&ring, *j)),
                None => one.clone(),
            })
            .collect();
        let invs: Vec<RatFunc> = slots
            .iter()
            .map(|s| match s {
                Some(j) => RatFunc::from_poly(Poly::generator_pow(&ring, *j, -1)),
                None => one.clone(),
            })
            .collect();
        let r2 = ring.clone();
        let konst = move |c: &GaussRat| RatFunc::constant(&r2, c.clone());
        Ok(p.eval_with(&comps, &gens, &invs, &konst))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap> {
        let w = self.w.iter().map(|c| inner.compose_ratfunc(c)).collect::<Result<Vec<_>>>()?;
        let s = inner.compose_ratfunc(&self.s)?;
        RationalMap::new(inner.n_src, w, s)
    }

    /// Differential of a function as a 1-form.
    pub fn differential(f: &RatFunc) -> Form {
        let n = f.dim();
        let ring = f.ring().clone();
        let mut out = Form::zero(&ring, 1);
        for v in Var::all(n) {
            let dv = f.derive(v);
            if !dv.is_zero() {
                out = out.add(&Form::monomial(&ring, &[v.index(n)], dv));
            }
        }
        out
    }

    /// `F^*a`.
    pub fn pullback(&self, a: &Form) -> Result<Form> {
        let diffs: Vec<Form> = self.components().iter().map(Self::differential).collect();
        let ring = self.ring();
        let mut out = Form::zero(&ring, a.degree());
        for (idx, c) in a.terms() {
            let mut piece = Form::function(self.compose_ratfunc(c)?);
            for &i in idx {
                piece = piece.wedge(&diffs[i]);
            }
            out = out.add(&piece);
        }
        Ok(out)
    }

    /// Components `X(F^k)` of `dF(X)` along the target basis, as functions on
    /// the source patch.
    pub fn pushforward(&self, x: &VectorField) -> VectorField {
        VectorField::from_coeffs(self.components().iter().map(|c| x.apply(c)).collect())
    }

    /// Target field `Y` transported to the source patch: `Y^k ∘ F`.
    pub fn along(&self, y: &VectorField) -> Result<VectorField> {
        Ok(VectorField::from_coeffs(y.coeffs().iter().map(|c| self.compose_ratfunc(c)).collect::<Result<Vec<_>>>()?))
    }

    /// Images of the jet variables at `x`: jets of `(w, s)` in the real source
    /// coordinates `(Re z, Im z, t)`.
    pub fn jet_at(&self, x: &GroupPoint, order: usize) -> (Vec<Jet>, Jet) {
        let n = self.n_src;
        let space = JetSpace::new(2 * n + 1, order);
        let mut z = Vec::with_capacity(n);
        for a in 0..n {
            let re = Jet::variable(&space, 2 * a, x.z[a].re);
            let im = Jet::variable(&space, 2 * a + 1, x.z[a].im);
            z.push(&re + &im.scale(Complex64::new(0.0, 1.0)));
        }
        let t = Jet::variable(&space, 2 * n, x.t);
        self.apply_jets(&space, &z, &t)
    }

    /// Evaluates the map on jet-valued coordinates.
    pub fn apply_jets(&self, space: &Arc<JetSpace>, z: &[Jet], t: &Jet) -> (Vec<Jet>, Jet) {
        let mut vars: Vec<Jet> = z.to_vec();
        vars.extend(z.iter().map(Jet::conj));
        vars.push(t.clone());
        let ring = self.ring();
        let konst = |c: &GaussRat| Jet::constant(space, c.to_complex());
        let gens: Vec<Jet> = ring.generators().iter().map(|f| f.eval_with(&vars, &[], &[], &konst).exp()).collect();
        let invs: Vec<Jet> = gens.iter().map(Jet::recip).collect();
        let w = self.w.iter().map(|c| c.lift(&ring).eval_with(&vars, &gens, &invs, &konst)).collect();
        let s = self.s.lift(&ring).eval_with(&vars, &gens, &invs, &konst);
        let s_re = &(&s + &s.conj()) * &Jet::constant(space, Complex64::new(0.5, 0.0));
        (w, s_re)
    }

    /// Real Jacobian at `x` with rows `(Re w, Im w, s)` and columns `(Re z, Im z, t)`.
    pub fn real_jacobian(&self, x: &GroupPoint) -> Vec<Vec<f64>> {
        let n = self.n_src;
        let (w, s) = self.jet_at(x, 1);
        let mut rows = Vec::new();
        let unit = |k: usize| {
            let mut m = vec![0u8; 2 * n + 1];
            m[k] = 1;
            m
        };
        for c in &w {
            rows.push((0..2 * n + 1).map(|k| c.derivative(&unit(k)).re).collect());
            rows.push((0..2 * n + 1).map(|k| c.derivative(&unit(k)).im).collect());
        }
        rows.push((0..2 * n + 1).map(|k| s.derivative(&unit(k)).re).collect());
        rows
    }
}
