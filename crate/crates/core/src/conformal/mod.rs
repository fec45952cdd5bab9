//! Pseudoconformal changes `θ̃ = e^{2f}θ`.

mod formulas;

pub use formulas::{
    transform_tensors, AIndexReading, F0Reading, MixedTorsionReading, PRaiseReading, Predicted, RSymReading, Reading,
    VMixedReading,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::linsolve::{self, Equation};
use crate::point::GroupPoint;
use crate::pseudoherm::{solve_connection, Dir, PHStructure, TensorSet};
use crate::scalar::{GaussRat, Poly, RatFunc, Ring};

/// A real conformal exponent `f` with its frame derivatives and `v^α`.
#[derive(Clone, Debug)]
pub struct ConformalChange {
    pub f: Poly,
    pub ring: Arc<Ring>,
    /// `e^f` as a generator of `ring` (the constant 1 when `f = 0`).
    pub e: RatFunc,
    pub f_alpha: Vec<RatFunc>,
    pub f_bar: Vec<RatFunc>,
    pub f0: RatFunc,
    pub v: Vec<RatFunc>,
}

impl ConformalChange {
    pub fn new(f: Poly, s: &PHStructure) -> Result<Self> {
        let f = match f.drop_generators() {
            Some(f) if f.dim() == s.n => f,
            _ => return Err(Error::Invalid("f must be a plain polynomial on the same patch".into())),
        };
        if !f.is_real() {
            return Err(Error::Invalid("f must be real".into()));
        }
        let (ring, e) = if f.is_zero() {
            (s.ring(), RatFunc::one(&s.ring()))
        } else {
            let (ring, j) = s.ring().extend(f.clone())?;
            let e = RatFunc::from_poly(Poly::generator(&ring, j));
            (ring, e)
        };
        let fr = RatFunc::from_poly(f.lift(&ring));
        let f_alpha: Vec<RatFunc> = (0..s.n).map(|a| s.derive(Dir::Z(a), &fr)).collect();
        let f_bar: Vec<RatFunc> = f_alpha.iter().map(RatFunc::conj).collect();
        let f0 = s.derive(Dir::T, &fr);
        let v = solve_v(&f_alpha, s)?;
        Ok(ConformalChange { f, ring, e, f_alpha, f_bar, f0, v })
    }

    pub fn v_bar(&self) -> Vec<RatFunc> {
        self.v.iter().map(RatFunc::conj).collect()
    }

    /// `v_α = v^β̄ g_{αβ̄}`.
    pub fn v_lower(&self, s: &PHStructure) -> Vec<RatFunc> {
        let vb = self.v_bar();
        (0..s.n).map(|a| (0..s.n).fold(RatFunc::zero(&self.ring), |acc, b| &acc + &(&vb[b] * &s.g[a][b]))).collect()
    }

    /// Residual of `f_α = i v_α + p_{αβ} v^β`.
    pub fn v_residual(&self, s: &PHStructure) -> Vec<RatFunc> {
        let vl = self.v_lower(s);
        (0..s.n)
            .map(|a| {
                let mut r = &self.f_alpha[a] - &vl[a].scale(&GaussRat::i());
                for b in 0..s.n {
                    r = &r - &(&s.p[a][b] * &self.v[b]);
                }
                r
            })
            .collect()
    }
}

/// Solves `f_α = i v_α + p_{αβ} v^β` jointly with its conjugate.
pub fn solve_v(f_alpha: &[RatFunc], s: &PHStructure) -> Result<Vec<RatFunc>> {
    let n = s.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let i = GaussRat::i();
    let mut eqs = Vec::with_capacity(2 * n);
    for a in 0..n {
        // unknowns: v^β at β, v^β̄ at n + β
        let mut e = Equation::new(f_alpha[a].clone());
        let mut c = Equation::new(f_alpha[a].conj());
        for b in 0..n {
            e.add_term(n + b, s.g[a][b].scale(&i));
            e.add_term(b, s.p[a][b].clone());
            c.add_term(b, s.g[a][b].conj().scale(&-&i));
            c.add_term(n + b, s.p[a][b].conj());
        }
        eqs.push(e);
        eqs.push(c);
    }
    let sol = linsolve::solve(2 * n, eqs).map_err(|e| match e {
        Error::Singular(m) => Error::Singular(format!("v-system: {m}")),
        other => other,
    })?;
    for b in 0..n {
        if sol[n + b] != sol[b].conj() {
            return Err(Error::Inconsistent("v-solution is not conjugate-consistent".into()));
        }
    }
    Ok(sol[..n].to_vec())
}

/// The changed structure `(e^{2f}θ, e^f(θ^α + v^α θ))`, checked to keep `g` and `p`.
pub fn transform_coframe(c: &ConformalChange, s: &PHStructure) -> Result<PHStructure> {
    if c.f.is_zero() {
        return Ok(s.clone());
    }
    let theta = s.theta.lift(&c.ring);
    let coframe: Vec<Form> = s.coframe.iter().zip(&c.v).map(|(t, v)| t.lift(&c.ring).add(&theta.scale(v)).scale(&c.e)).collect();
    let out = PHStructure::new(theta.scale(&(&c.e * &c.e)), coframe)?;
    for a in 0..s.n {
        for b in 0..s.n {
            if out.g[a][b] != s.g[a][b] || out.p[a][b] != s.p[a][b] {
                return Err(Error::NotAdmissible("Levi form or p changed under the conformal change".into()));
            }
        }
    }
    if out.admissibility_defects() != 0 {
        return Err(Error::NotAdmissible("transformed coframe is not admissible".into()));
    }
    Ok(out)
}

/// Per-tensor comparison of formula against direct recomputation.
#[derive(Clone, Debug)]
pub struct TensorDeviation {
    pub name: String,
    pub exact_match: bool,
    pub max_deviation: f64,
}

#[derive(Clone, Debug)]
pub struct CrossValidation {
    pub reading: Reading,
    pub tensors: Vec<TensorDeviation>,
    pub pass: bool,
}

impl CrossValidation {
    pub fn max_deviation(&self) -> f64 {
        self.tensors.iter().map(|t| t.max_deviation).fold(0.0, f64::max)
    }
}

/// Everything needed to compare readings without re-solving.
pub struct Comparison {
    pub change: ConformalChange,
    pub base: TensorSet,
    pub direct: TensorSet,
    pub changed: PHStructure,
}

impl Comparison {
    pub fn new(f: Poly, s: &PHStructure) -> Result<Self> {
        let change = ConformalChange::new(f, s)?;
        let base = solve_connection(s)?;
        let changed = transform_coframe(&change, s)?;
        let direct = solve_connection(&changed)?;
        Ok(Comparison { change, base, direct, changed })
    }

    pub fn validate(&self, s: &PHStructure, reading: Reading, samples: &[GroupPoint], tol: f64) -> Result<CrossValidation> {
        let pred = transform_tensors(&self.change, s, &self.base, reading)?;
        let mut tensors = Vec::new();
        for ((name, formula), (_, direct)) in pred.named().into_iter().zip(self.direct.named()) {
            let exact_match = formula == direct;
            let mut dev: f64 = 0.0;
            if !exact_match {
                for x in samples {
                    dev = dev.max(formula.eval(x).max_deviation(&direct.eval(x)));
                }
            }
            tensors.push(TensorDeviation { name: name.to_string(), exact_match, max_deviation: dev });
        }
        let pass = tensors.iter().all(|t| t.exact_match || t.max_deviation <= tol);
        Ok(CrossValidation { reading, tensors, pass })
    }
}

/// Compares every transformed tensor computed by formula with direct recomputation.
pub fn cross_validate(f: Poly, s: &PHStructure, reading: Reading, samples: &[GroupPoint], tol: f64) -> Result<CrossValidation> {
    Comparison::new(f, s)?.validate(s, reading, samples, tol)
}

/// Runs every candidate reading and returns the ones that pass.
pub fn discriminate_readings(f: Poly, s: &PHStructure, samples: &[GroupPoint], tol: f64) -> Result<Vec<CrossValidation>> {
    let cmp = Comparison::new(f, s)?;
    Reading::all().into_iter().map(|r| cmp.validate(s, r, samples, tol)).collect()
}
