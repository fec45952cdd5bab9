use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::VectorField;
use crate::point::GroupPoint;
use crate::scalar::{GaussRat, Poly, RatFunc, Ring, Var};

/// A `k`-form `Σ a_I dx^{i₁}∧…∧dx^{i_k}` with strictly increasing keys in the
/// basis order `(dz^α, dz̄^α, dt)`.
///
/// Evaluation follows the determinant convention
/// `(α∧β)(X,Y) = α(X)β(Y) − α(Y)β(X)` with no normalizing factors.
#[derive(Clone)]
pub struct Form {
    ring: Arc<Ring>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, RatFunc>,
}

/// Sorts `idx` in place; returns the permutation sign or `None` on a repeat.
fn sort_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl Form {
    pub fn zero(ring: &Arc<Ring>, degree: usize) -> Self {
        Self { ring: ring.clone(), degree, terms: BTreeMap::new() }
    }

    /// The 0-form `f`.
    pub fn function(f: RatFunc) -> Self {
        let mut out = Self::zero(&f.ring().clone(), 0);
        if !f.is_zero() {
            out.terms.insert(Vec::new(), f);
        }
        out
    }

    /// The coordinate 1-form `dv`.
    pub fn coordinate(ring: &Arc<Ring>, v: Var) -> Self {
        Self::monomial(ring, &[v.index(ring.dim())], RatFunc::one(ring))
    }

    /// `c·dx^{i₁}∧…∧dx^{i_k}` for an arbitrary index list.
    pub fn monomial(ring: &Arc<Ring>, idx: &[usize], c: RatFunc) -> Self {
        let mut out = Self::zero(ring, idx.len());
        out.add_term(idx, c);
        out
    }

    fn add_term(&mut self, idx: &[usize], c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let mut key = idx.to_vec();
        let Some(sign) = sort_sign(&mut key) else { return };
        let c = if sign < 0 { -c } else { c };
        if let Ok(r) = Ring::join(&self.ring, c.ring()) {
            self.ring = r;
        }
        let merged = match self.terms.remove(&key) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(key, merged);
        }
    }

    /// Builds a form from `(basis indices, coefficient)` pairs.
    pub fn from_terms(ring: &Arc<Ring>, degree: usize, terms: impl IntoIterator<Item = (Vec<usize>, RatFunc)>) -> Self {
        let mut out = Self::zero(ring, degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree, "basis key length must equal the degree");
            out.add_term(&idx, c);
        }
        out
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.ring.dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &RatFunc)> {
        self.terms.iter()
    }

    pub fn coeff(&self, idx: &[usize]) -> RatFunc {
        let mut key = idx.to_vec();
        match sort_sign(&mut key) {
            None => RatFunc::zero(&self.ring),
            Some(sign) => {
                let c = self.terms.get(&key).cloned().unwrap_or_else(|| RatFunc::zero(&self.ring));
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Form) -> Form {
        assert_eq!(self.degree, o.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Form {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect();
        Form { ring: self.ring.clone(), degree: self.degree, terms }
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &RatFunc) -> Form {
        let mut out = Form::zero(&self.ring, self.degree);
        for (k, c) in &self.terms {
            out.add_term(k, c * f);
        }
        out
    }

    pub fn scale_const(&self, c: &GaussRat) -> Form {
        self.scale(&RatFunc::constant(&self.ring, c.clone()))
    }

    pub fn wedge(&self, o: &Form) -> Form {
        let mut out = Form::zero(&self.ring, self.degree + o.degree);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let mut idx = ka.clone();
                idx.extend_from_slice(kb);
                out.add_term(&idx, ca * cb);
            }
        }
        out
    }

    /// Exterior derivative; generators differentiate as `dE_j = E_j df_j`.
    pub fn d(&self) -> Form {
        let n = self.dim();
        let mut out = Form::zero(&self.ring, self.degree + 1);
        for (k, c) in &self.terms {
            for v in Var::all(n) {
                let dc = c.derive(v);
                if dc.is_zero() {
                    continue;
                }
                let mut idx = vec![v.index(n)];
                idx.extend_from_slice(k);
                out.add_term(&idx, dc);
            }
        }
        out
    }

    /// Interior product `X ⌟ a`, the contraction in the first slot.
    pub fn interior(&self, x: &VectorField) -> Form {
        assert!(self.degree >= 1, "interior product needs a form of positive degree");
        let mut out = Form::zero(&self.ring, self.degree - 1);
        for (k, c) in &self.terms {
            for (j, &i) in k.iter().enumerate() {
                let xi = &x.coeffs()[i];
                if xi.is_zero() {
                    continue;
                }
                let mut rest = k.clone();
                rest.remove(j);
                let term = c * xi;
                out.add_term(&rest, if j % 2 == 0 { term } else { -term });
            }
        }
        out
    }

    /// Value on `degree` vector fields.
    pub fn eval(&self, fields: &[&VectorField]) -> RatFunc {
        assert_eq!(fields.len(), self.degree, "wrong number of arguments");
        if self.degree == 0 {
            return self.coeff(&[]);
        }
        let mut acc = RatFunc::zero(&self.ring);
        for (k, c) in &self.terms {
            let det = det_ratfunc(k, fields);
            if !det.is_zero() {
                acc = &acc + &(c * &det);
            }
        }
        acc
    }

    /// Value of a 1-form on a field.
    pub fn apply(&self, x: &VectorField) -> RatFunc {
        self.eval(&[x])
    }

    /// Complex conjugate: `dz ↔ dz̄` with conjugated coefficients.
    pub fn conj(&self) -> Form {
        let n = self.dim();
        let mut out = Form::zero(&self.ring, self.degree);
        for (k, c) in &self.terms {
            let idx: Vec<usize> = k.iter().map(|&i| Var::from_index(i, n).conj().index(n)).collect();
            out.add_term(&idx, c.conj());
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// The unique function coefficient of a 0-form.
    pub fn as_function(&self) -> RatFunc {
        assert_eq!(self.degree, 0, "not a 0-form");
        self.coeff(&[])
    }

    /// Numeric evaluation at a point on numeric tangent vectors.
    pub fn eval_at(&self, point: &GroupPoint, vectors: &[Vec<Complex64>]) -> Complex64 {
        let gens = Poly::generator_values(&self.ring, point);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let det = det_numeric(k, vectors);
            if det != Complex64::new(0.0, 0.0) {
                acc += c.lift(&self.ring).eval(point, &gens) * det;
            }
        }
        acc
    }

    pub fn lift(&self, ring: &Arc<Ring>) -> Form {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c.lift(ring))).collect();
        Form { ring: ring.clone(), degree: self.degree, terms }
    }
}

fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            let swaps = (p.len() - pos) as i64;
            out.push((q, if swaps % 2 == 0 { s } else { -s }));
        }
    }
    out
}

fn det_ratfunc(idx: &[usize], fields: &[&VectorField]) -> RatFunc {
    let ring = fields.first().map(|f| f.ring()).expect("nonempty argument list");
    let mut acc = RatFunc::zero(&ring);
    for (perm, sign) in permutations(idx.len()) {
        let mut prod = RatFunc::one(&ring);
        for (slot, &p) in perm.iter().enumerate() {
            let c = &fields[p].coeffs()[idx[slot]];
            if c.is_zero() {
                prod = RatFunc::zero(&ring);
                break;
            }
            prod = &prod * c;
        }
        if !prod.is_zero() {
            acc = if sign > 0 { &acc + &prod } else { &acc - &prod };
        }
    }
    acc
}

fn det_numeric(idx: &[usize], vectors: &[Vec<Complex64>]) -> Complex64 {
    if idx.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (perm, sign) in permutations(idx.len()) {
        let prod: Complex64 = perm.iter().enumerate().map(|(slot, &p)| vectors[p][idx[slot]]).product();
        acc += prod * sign as f64;
    }
    acc
}

impl PartialEq for Form {
    fn eq(&self, o: &Self) -> bool {
        self.degree == o.degree && self.sub(o).is_zero()
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let n = self.dim();
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{c}]")?;
            let names: Vec<String> = k
                .iter()
                .map(|&j| match Var::from_index(j, n) {
                    Var::Z(a) => format!("dz{}", a + 1),
                    Var::Zbar(a) => format!("dzb{}", a + 1),
                    Var::T => "dt".into(),
                })
                .collect();
            write!(f, "{}", names.join("^"))?;
        }
        Ok(())
    }
}
