//! Sparse polynomials in `z¹..zⁿ, z̄¹..z̄ⁿ, t` with Gaussian-rational coefficients
//! and Laurent exponential generators `E_j = e^{f_j}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::GaussRat;
use crate::error::{Error, Result};
use crate::point::GroupPoint;

/// A coordinate of the patch `ℂⁿ × ℝ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Z(usize),
    Zbar(usize),
    T,
}

impl Var {
    /// Position in the basis order `(z¹..zⁿ, z̄¹..z̄ⁿ, t)`.
    pub fn index(self, n: usize) -> usize {
        match self {
            Var::Z(a) => a,
            Var::Zbar(a) => n + a,
            Var::T => 2 * n,
        }
    }

    pub fn from_index(k: usize, n: usize) -> Var {
        if k < n {
            Var::Z(k)
        } else if k < 2 * n {
            Var::Zbar(k - n)
        } else {
            Var::T
        }
    }

    pub fn conj(self) -> Var {
        match self {
            Var::Z(a) => Var::Zbar(a),
            Var::Zbar(a) => Var::Z(a),
            Var::T => Var::T,
        }
    }

    /// All `2n+1` coordinates in basis order.
    pub fn all(n: usize) -> Vec<Var> {
        (0..2 * n + 1).map(|k| Var::from_index(k, n)).collect()
    }
}

/// Polynomial ring data: patch dimension and declared exponential generators.
///
/// Each generator `f_j` is a real polynomial without generators; the family
/// `f_1..f_m` must be linearly independent over ℚ so that the `E_j` are
/// algebraically independent and the term map stays a canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    n: usize,
    gens: Vec<Poly>,
}

impl Ring {
    pub fn base(n: usize) -> Arc<Ring> {
        Arc::new(Ring { n, gens: Vec::new() })
    }

    pub fn with_generators(n: usize, gens: Vec<Poly>) -> Result<Arc<Ring>> {
        for (j, f) in gens.iter().enumerate() {
            if f.ring.n != n || !f.ring.gens.is_empty() {
                return Err(Error::InvalidGenerator(format!("generator {j} must be a plain polynomial on the same patch")));
            }
            if !f.is_real() {
                return Err(Error::InvalidGenerator(format!("generator {j} is not real")));
            }
        }
        if rational_rank(&gens) < gens.len() {
            return Err(Error::InvalidGenerator("generator exponents are linearly dependent over Q".into()));
        }
        Ok(Arc::new(Ring { n, gens }))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    pub fn n_gens(&self) -> usize {
        self.gens.len()
    }

    /// Length of a monomial exponent vector.
    pub fn width(&self) -> usize {
        2 * self.n + 1 + self.gens.len()
    }

    /// Returns the ring extended by `f` and the index of `f`, reusing an equal
    /// generator when already declared.
    pub fn extend(self: &Arc<Ring>, f: Poly) -> Result<(Arc<Ring>, usize)> {
        if let Some(j) = self.gens.iter().position(|g| *g == f) {
            return Ok((self.clone(), j));
        }
        let mut gens = self.gens.clone();
        gens.push(f);
        let j = gens.len() - 1;
        Ok((Ring::with_generators(self.n, gens)?, j))
    }

    /// A ring containing the generators of both, listing those of `a` first.
    pub fn join(a: &Arc<Ring>, b: &Arc<Ring>) -> Result<Arc<Ring>> {
        if Arc::ptr_eq(a, b) {
            return Ok(a.clone());
        }
        if a.n != b.n {
            return Err(Error::RingMismatch(format!("patch dimension {} vs {}", a.n, b.n)));
        }
        let (short, long) = if a.gens.len() <= b.gens.len() { (a, b) } else { (b, a) };
        if long.gens[..short.gens.len()] == short.gens[..] {
            return Ok(long.clone());
        }
        let mut gens = a.gens.clone();
        for g in &b.gens {
            if !gens.contains(g) {
                gens.push(g.clone());
            }
        }
        if gens.len() == a.gens.len() {
            return Ok(a.clone());
        }
        Ring::with_generators(a.n, gens).map_err(|_| Error::RingMismatch("incompatible exponential generators".into()))
    }
}

/// Rank over ℚ of real polynomials viewed as rational coefficient vectors.
fn rational_rank(polys: &[Poly]) -> usize {
    let mut keys: Vec<Vec<i32>> = polys.iter().flat_map(|p| p.terms.keys().cloned()).collect();
    keys.sort();
    keys.dedup();
    let mut rows: Vec<Vec<BigRational>> = polys
        .iter()
        .map(|p| {
            let mut row = Vec::with_capacity(2 * keys.len());
            for k in &keys {
                let c = p.terms.get(k).cloned().unwrap_or_default();
                row.push(c.re);
                row.push(c.im);
            }
            row
        })
        .collect();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, piv);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = &rows[r][c] / &pivot;
                for k in c..cols {
                    let delta = &factor * &rows[rank][k];
                    rows[r][k] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exponent vector laid out as `(z¹..zⁿ, z̄¹..z̄ⁿ, t, E_1..E_m)`; generator
/// exponents may be negative.
pub type Monomial = Vec<i32>;

/// A polynomial in canonical form: no zero coefficients, unique monomial keys,
/// lexicographic monomial order.
#[derive(Clone)]
pub struct Poly {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, GaussRat>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            return self.terms == other.terms;
        }
        match Ring::join(&self.ring, &other.ring) {
            Ok(r) => self.lift(&r).terms == other.lift(&r).terms,
            Err(_) => false,
        }
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, GaussRat::one())
    }

    pub fn constant(ring: &Arc<Ring>, c: GaussRat) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(vec![0; ring.width()], c);
        }
        p
    }

    pub fn var(ring: &Arc<Ring>, v: Var) -> Self {
        let mut m = vec![0; ring.width()];
        m[v.index(ring.n)] = 1;
        Self::monomial(ring, m, GaussRat::one())
    }

    /// The generator `E_j`.
    pub fn generator(ring: &Arc<Ring>, j: usize) -> Self {
        Self::generator_pow(ring, j, 1)
    }

    pub fn generator_pow(ring: &Arc<Ring>, j: usize, e: i32) -> Self {
        assert!(j < ring.gens.len(), "generator index out of range");
        let mut m = vec![0; ring.width()];
        m[2 * ring.n + 1 + j] = e;
        Self::monomial(ring, m, GaussRat::one())
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: GaussRat) -> Self {
        assert_eq!(m.len(), ring.width(), "monomial width");
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds a polynomial from `(coefficient, monomial)` pairs, merging duplicates.
    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (GaussRat, Monomial)>) -> Self {
        let mut map: BTreeMap<Monomial, GaussRat> = BTreeMap::new();
        for (c, m) in terms {
            assert_eq!(m.len(), ring.width(), "monomial width");
            *map.entry(m).or_insert_with(GaussRat::zero) += &c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { ring: ring.clone(), terms: map }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.ring.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is a constant `c` (no coordinate or generator dependence).
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.iter().all(|&e| e == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// A single term whose coordinate exponents all vanish: `c·E^k`, a unit of the ring.
    pub fn as_unit(&self) -> Option<(GaussRat, Vec<i32>)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let coord = 2 * self.ring.n + 1;
        m[..coord].iter().all(|&e| e == 0).then(|| (c.clone(), m[coord..].to_vec()))
    }

    /// Total degree in the coordinates (generators excluded).
    pub fn degree(&self) -> i32 {
        let coord = 2 * self.ring.n + 1;
        self.terms.keys().map(|m| m[..coord].iter().sum::<i32>()).max().unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        let k = v.index(self.ring.n);
        self.terms.keys().any(|m| m[k] != 0)
            || self
                .terms
                .keys()
                .any(|m| m[2 * self.ring.n + 1..].iter().zip(&self.ring.gens).any(|(&e, f)| e != 0 && f.depends_on(v)))
    }

    pub fn has_generators(&self) -> bool {
        let coord = 2 * self.ring.n + 1;
        self.terms.keys().any(|m| m[coord..].iter().any(|&e| e != 0))
    }

    /// The same polynomial over the plain ring when no generator occurs.
    pub fn drop_generators(&self) -> Option<Poly> {
        if self.has_generators() {
            return None;
        }
        let base = Ring::base(self.ring.n);
        let coord = 2 * self.ring.n + 1;
        let terms = self.terms.iter().map(|(m, c)| (m[..coord].to_vec(), c.clone())).collect();
        Some(Poly { ring: base, terms })
    }

    /// Re-expresses the polynomial over a ring that declares all of its generators.
    pub fn lift(&self, ring: &Arc<Ring>) -> Poly {
        if Arc::ptr_eq(&self.ring, ring) {
            return self.clone();
        }
        assert!(ring.n == self.ring.n, "lift to an incompatible ring");
        let coord = 2 * ring.n + 1;
        let slots: Vec<usize> =
            self.ring.gens.iter().map(|g| ring.gens.iter().position(|h| h == g).expect("lift to an incompatible ring")).collect();
        let w = ring.width();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = m[..coord].to_vec();
                m2.resize(w, 0);
                for (j, &e) in m[coord..].iter().enumerate() {
                    m2[coord + slots[j]] = e;
                }
                (m2, c.clone())
            })
            .collect();
        Poly { ring: ring.clone(), terms }
    }

    fn joined(&self, other: &Poly) -> Result<(Poly, Poly)> {
        if Arc::ptr_eq(&self.ring, &other.ring) {
            return Ok((self.clone(), other.clone()));
        }
        let r = Ring::join(&self.ring, &other.ring)?;
        Ok((self.lift(&r), other.lift(&r)))
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        if Arc::ptr_eq(&self.ring, &other.ring) {
            return Ok(self.add_same(other));
        }
        let (a, b) = self.joined(other)?;
        Ok(a.add_same(&b))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.checked_add(&other.neg_ref())
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        if Arc::ptr_eq(&self.ring, &other.ring) {
            return Ok(self.mul_same(other));
        }
        let (a, b) = self.joined(other)?;
        Ok(a.mul_same(&b))
    }

    fn add_same(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.terms.len() >= other.terms.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.terms {
            match big.terms.get_mut(m) {
                Some(e) => {
                    *e += c;
                    if e.is_zero() {
                        big.terms.remove(m);
                    }
                }
                None => {
                    big.terms.insert(m.clone(), c.clone());
                }
            }
        }
        big
    }

    fn mul_same(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.ring);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let mut out: BTreeMap<Monomial, GaussRat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                *out.entry(m).or_insert_with(GaussRat::zero) += &c;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Poly { ring: self.ring.clone(), terms: out }
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        if c.is_one() {
            return self.clone();
        }
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        Poly { ring: self.ring.clone(), terms }
    }

    pub fn neg_ref(&self) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect();
        Poly { ring: self.ring.clone(), terms }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_same(&base);
            }
        }
        acc
    }

    /// Multiplies by a monomial (which may carry negative generator exponents).
    pub fn shift(&self, m: &[i32]) -> Poly {
        let terms = self.terms.iter().map(|(k, c)| (k.iter().zip(m).map(|(a, b)| a + b).collect(), c.clone())).collect();
        Poly { ring: self.ring.clone(), terms }
    }

    /// Partial derivative. Generators obey `∂E_j = E_j ∂f_j`.
    pub fn derive(&self, v: Var) -> Poly {
        let n = self.ring.n;
        let k = v.index(n);
        let mut out: BTreeMap<Monomial, GaussRat> = BTreeMap::new();
        for (m, c) in &self.terms {
            if m[k] != 0 {
                let mut m2 = m.clone();
                m2[k] -= 1;
                let c2 = c * &GaussRat::from(m[k] as i64);
                *out.entry(m2).or_insert_with(GaussRat::zero) += &c2;
            }
        }
        let mut result = Poly { ring: self.ring.clone(), terms: out };
        for (j, f) in self.ring.gens.iter().enumerate() {
            let df = f.derive(v);
            if df.is_zero() {
                continue;
            }
            let idx = 2 * n + 1 + j;
            let mut part: BTreeMap<Monomial, GaussRat> = BTreeMap::new();
            for (m, c) in &self.terms {
                if m[idx] != 0 {
                    part.insert(m.clone(), c * &GaussRat::from(m[idx] as i64));
                }
            }
            if part.is_empty() {
                continue;
            }
            let part = Poly { ring: self.ring.clone(), terms: part };
            result = result.add_same(&part.mul_same(&df.lift(&self.ring)));
        }
        result.terms.retain(|_, c| !c.is_zero());
        result
    }

    /// Complex conjugation: `z ↔ z̄`, coefficients conjugated, `t` and `E_j` fixed.
    pub fn conj(&self) -> Poly {
        let n = self.ring.n;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m2 = m.clone();
                for a in 0..n {
                    m2.swap(a, n + a);
                }
                (m2, c.conj())
            })
            .collect();
        Poly { ring: self.ring.clone(), terms }
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Real part `(p + conj p)/2`.
    pub fn re(&self) -> Poly {
        self.add_same(&self.conj()).scale(&GaussRat::rational(1, 2))
    }

    /// Imaginary part `(p − conj p)/(2i)`.
    pub fn im(&self) -> Poly {
        self.add_same(&self.conj().neg_ref()).scale(&GaussRat::from_fracs(0, 1, -1, 2))
    }

    /// Values of `(E_1..E_m)` at a point: `exp(f_j(point))`.
    pub fn generator_values(ring: &Ring, point: &GroupPoint) -> Vec<Complex64> {
        ring.gens.iter().map(|f| f.eval(point, &[]).exp()).collect()
    }

    /// Evaluation homomorphism into machine complex numbers. `expvals` supplies
    /// the generator values; when empty they are computed from the point.
    pub fn eval(&self, point: &GroupPoint, expvals: &[Complex64]) -> Complex64 {
        assert_eq!(point.dim(), self.ring.n, "point dimension");
        let owned;
        let gens: &[Complex64] = if expvals.is_empty() && !self.ring.gens.is_empty() {
            owned = Self::generator_values(&self.ring, point);
            &owned
        } else {
            expvals
        };
        let vars = point.coords();
        let invs: Vec<Complex64> = gens.iter().map(|g| g.inv()).collect();
        self.eval_with(&vars, gens, &invs, &|c: &GaussRat| c.to_complex())
    }

    /// Generic evaluation over any commutative ring-like scalar type.
    pub fn eval_with<S>(&self, vars: &[S], gens: &[S], gen_invs: &[S], konst: &dyn Fn(&GaussRat) -> S) -> S
    where
        S: Clone + Add<Output = S> + Mul<Output = S>,
    {
        let coord = 2 * self.ring.n + 1;
        let mut cache: HashMap<(usize, i32), S> = HashMap::new();
        let mut acc: Option<S> = None;
        for (m, c) in &self.terms {
            let mut term = konst(c);
            for (k, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = cache
                    .entry((k, e))
                    .or_insert_with(|| {
                        let base = if k < coord {
                            vars[k].clone()
                        } else if e > 0 {
                            gens[k - coord].clone()
                        } else {
                            gen_invs[k - coord].clone()
                        };
                        pow_generic(base, e.unsigned_abs())
                    })
                    .clone();
                term = term * p;
            }
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        acc.unwrap_or_else(|| konst(&GaussRat::zero()))
    }

    /// Exact division when `divisor` divides `self` in the Laurent ring; `None` otherwise.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (num, den) = self.joined(divisor).ok()?;
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(num);
        }
        if let Some((c, m)) = den.as_unit() {
            let coord = 2 * den.ring.n + 1;
            let mut shift = vec![0; den.ring.width()];
            for (j, e) in m.iter().enumerate() {
                shift[coord + j] = -e;
            }
            return Some(num.shift(&shift).scale(&c.inv()?));
        }
        let w = num.ring.width();
        // Newton-box bound on quotient exponents guarantees termination.
        let bounds = |p: &Poly| {
            let mut lo = vec![i32::MAX; w];
            let mut hi = vec![i32::MIN; w];
            for m in p.terms.keys() {
                for k in 0..w {
                    lo[k] = lo[k].min(m[k]);
                    hi[k] = hi[k].max(m[k]);
                }
            }
            (lo, hi)
        };
        let (nlo, nhi) = bounds(&num);
        let (dlo, dhi) = bounds(&den);
        let qlo: Vec<i32> = (0..w).map(|k| nlo[k] - dlo[k]).collect();
        let qhi: Vec<i32> = (0..w).map(|k| nhi[k] - dhi[k]).collect();
        let coord = 2 * num.ring.n + 1;
        let (dlead_m, dlead_c) = den.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))?;
        let dlead_inv = dlead_c.inv()?;
        let mut rem = num;
        let mut quot: BTreeMap<Monomial, GaussRat> = BTreeMap::new();
        while let Some((rm, rc)) = rem.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let qm: Monomial = rm.iter().zip(&dlead_m).map(|(a, b)| a - b).collect();
            if qm[..coord].iter().any(|&e| e < 0) || (0..w).any(|k| qm[k] < qlo[k] || qm[k] > qhi[k]) {
                return None;
            }
            let qc = &rc * &dlead_inv;
            let step = den.shift(&qm).scale(&qc);
            rem = rem.add_same(&step.neg_ref());
            quot.insert(qm, qc);
        }
        Some(Poly { ring: rem.ring.clone(), terms: quot })
    }

    /// Largest monomial dividing every term (coordinate exponents only, generators
    /// taken at their minimum), used to cancel common factors in fractions.
    pub fn min_monomial(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let mut lo = it.next()?.clone();
        for m in it {
            for (a, b) in lo.iter_mut().zip(m) {
                *a = (*a).min(*b);
            }
        }
        Some(lo)
    }

    /// Leading coefficient in the monomial order.
    pub fn leading_coeff(&self) -> Option<&GaussRat> {
        self.terms.values().next_back()
    }

    /// Replaces every coordinate and generator by numeric-free substitutes via
    /// a caller-supplied scalar type (used for composition with rational maps).
    pub fn map_coeffs(&self, f: impl Fn(&GaussRat) -> GaussRat) -> Poly {
        let mut terms: BTreeMap<Monomial, GaussRat> = self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect();
        terms.retain(|_, c| !c.is_zero());
        Poly { ring: self.ring.clone(), terms }
    }

    fn fmt_monomial(&self, m: &[i32], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.ring.n;
        let mut first = true;
        let mut put = |f: &mut fmt::Formatter<'_>, name: String, e: i32| -> fmt::Result {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")
            } else {
                write!(f, "{name}^{e}")
            }
        };
        for (k, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = if k < n {
                format!("z{}", k + 1)
            } else if k < 2 * n {
                format!("zb{}", k - n + 1)
            } else if k == 2 * n {
                "t".to_string()
            } else {
                format!("E{}", k - 2 * n)
            };
            put(f, name, e)?;
        }
        Ok(())
    }
}

fn pow_generic<S: Clone + Mul<Output = S>>(base: S, e: u32) -> S {
    let mut acc: Option<S> = None;
    let mut b = base;
    let mut e = e;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => b.clone(),
                Some(a) => a * b.clone(),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        b = b.clone() * b;
    }
    acc.expect("exponent is positive")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let is_const = m.iter().all(|&e| e == 0);
            if is_const {
                write!(f, "{c}")?;
            } else {
                if !c.is_one() {
                    write!(f, "{c}*")?;
                }
                self.fmt_monomial(m, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        self.checked_add(o).expect("polynomial ring mismatch")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self.checked_sub(o).expect("polynomial ring mismatch")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.checked_mul(o).expect("polynomial ring mismatch")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}

macro_rules! forward_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: &Poly) -> Poly {
                (&self).$m(o)
            }
        }
    };
}
forward_poly!(Add, add);
forward_poly!(Sub, sub);
forward_poly!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.neg_ref()
    }
}
