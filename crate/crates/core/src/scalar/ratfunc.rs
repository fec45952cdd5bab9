//! Fractions of [`Poly`] with factored denominators.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::poly::{Poly, Ring, Var};
use super::GaussRat;
use crate::error::{Error, Result};
use crate::point::GroupPoint;

/// A fraction `num/Π f_i^{e_i}`.
///
/// No multivariate gcd is computed. Denominators are kept as products of monic
/// factors that do not divide one another, and a numerator is trial-divided by
/// each factor, so spurious factors introduced by elimination cancel once the
/// numerator becomes divisible. Two equal fractions may still be stored
/// differently; [`PartialEq`] compares the difference with zero.
#[derive(Clone)]
pub struct RatFunc {
    num: Poly,
    fac: Vec<(Poly, u32)>,
    den: OnceLock<Poly>,
}

/// Splits `p` into a unit, single-variable powers and a monic remainder.
/// Returns the constant and generator shift to move into the numerator.
fn split_unit(p: &Poly) -> (GaussRat, Vec<i32>, Vec<(Poly, u32)>) {
    let ring = p.ring().clone();
    let n = ring.dim();
    let coord = 2 * n + 1;
    let mut parts = Vec::new();
    let mut inv_gens = vec![0; ring.width()];
    let mut rest = p.clone();
    if let Some(m) = p.min_monomial() {
        let shift: Vec<i32> = m.iter().map(|e| -e).collect();
        if shift.iter().any(|&s| s != 0) {
            rest = p.shift(&shift);
        }
        for (k, &e) in m[..coord].iter().enumerate() {
            if e > 0 {
                parts.push((Poly::var(&ring, Var::from_index(k, n)), e as u32));
            }
        }
        for (k, &e) in m.iter().enumerate().skip(coord) {
            inv_gens[k] = -e;
        }
    }
    let lc = rest.leading_coeff().cloned().unwrap_or_else(GaussRat::one);
    if let Some(c) = rest.as_constant() {
        return (c, inv_gens, parts);
    }
    let inv = lc.inv().expect("nonzero leading coefficient");
    parts.push((rest.scale(&inv), 1));
    (lc, inv_gens, parts)
}

/// Adds `p` to a basis of monic factors so that `p` and every earlier member
/// become products of basis elements.
fn refine(basis: &mut Vec<Poly>, p: Poly) {
    let mut work = vec![p];
    while let Some(p) = work.pop() {
        if p.as_constant().is_some() {
            continue;
        }
        let mut placed = false;
        for i in 0..basis.len() {
            if basis[i] == p {
                placed = true;
                break;
            }
            if let Some(q) = p.div_exact(&basis[i]) {
                work.push(q);
                placed = true;
                break;
            }
            if let Some(q) = basis[i].div_exact(&p) {
                basis[i] = p.clone();
                work.push(q);
                placed = true;
                break;
            }
        }
        if !placed {
            basis.push(p);
        }
    }
}

/// Exponents of `p` over `basis`, or `None` if a non-constant cofactor remains.
fn decompose(p: &Poly, basis: &[Poly]) -> Option<(Vec<u32>, GaussRat)> {
    let mut exps = vec![0; basis.len()];
    let mut rest = p.clone();
    for (i, b) in basis.iter().enumerate() {
        while rest.as_constant().is_none() {
            match rest.div_exact(b) {
                Some(q) => {
                    rest = q;
                    exps[i] += 1;
                }
                None => break,
            }
        }
    }
    rest.as_constant().map(|c| (exps, c))
}

/// Common basis for several factor lists, with each list's exponents over it
/// and the constant left over.
fn common_basis(lists: &[&[(Poly, u32)]]) -> (Vec<Poly>, Vec<(Vec<u32>, GaussRat)>) {
    let mut basis: Vec<Poly> = Vec::new();
    for l in lists {
        for (f, _) in l.iter() {
            refine(&mut basis, f.clone());
        }
    }
    loop {
        let mut out = Vec::with_capacity(lists.len());
        let mut leftover = None;
        'lists: for l in lists {
            let mut exps = vec![0u32; basis.len()];
            let mut c = GaussRat::one();
            for (f, e) in l.iter() {
                match decompose(f, &basis) {
                    Some((x, k)) => {
                        for (a, b) in exps.iter_mut().zip(&x) {
                            *a += b * e;
                        }
                        c = &c * &k.pow(*e);
                    }
                    None => {
                        leftover = Some(f.clone());
                        break 'lists;
                    }
                }
            }
            out.push((exps, c));
        }
        match leftover {
            // not expected for monic products, but keep the basis consistent
            Some(f) => {
                let mut rest = f.clone();
                for b in &basis {
                    while let Some(q) = rest.div_exact(b) {
                        if q.as_constant().is_some() {
                            break;
                        }
                        rest = q;
                    }
                }
                let lc = rest.leading_coeff().cloned().unwrap_or_else(GaussRat::one);
                basis.push(rest.scale(&lc.inv().expect("nonzero")));
            }
            None => return (basis, out),
        }
    }
}

fn product(ring: &Arc<Ring>, fac: &[(Poly, u32)]) -> Poly {
    fac.iter().fold(Poly::one(ring), |acc, (f, e)| &acc * &f.pow(*e))
}

impl RatFunc {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self::from_poly(Poly::zero(ring))
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::from_poly(Poly::one(ring))
    }

    pub fn constant(ring: &Arc<Ring>, c: GaussRat) -> Self {
        Self::from_poly(Poly::constant(ring, c))
    }

    pub fn var(ring: &Arc<Ring>, v: Var) -> Self {
        Self::from_poly(Poly::var(ring, v))
    }

    pub fn from_poly(p: Poly) -> Self {
        Self { num: p, fac: Vec::new(), den: OnceLock::new() }
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let r = Ring::join(num.ring(), den.ring())?;
        Ok(Self::from_parts(num.lift(&r), vec![(den.lift(&r), 1)]))
    }

    /// `num / Π f^e` for arbitrary nonzero factors on the ring of `num`.
    fn from_parts(num: Poly, raw: Vec<(Poly, u32)>) -> Self {
        if num.is_zero() {
            return Self::zero(num.ring());
        }
        let mut num = num;
        let mut fac: Vec<(Poly, u32)> = Vec::new();
        for (f, e) in raw {
            if e == 0 {
                continue;
            }
            let (c, shift, parts) = split_unit(&f);
            if shift.iter().any(|&s| s != 0) {
                num = num.shift(&shift.iter().map(|s| s * e as i32).collect::<Vec<_>>());
            }
            num = num.scale(&c.inv().expect("nonzero factor").pow(e));
            fac.extend(parts.into_iter().map(|(p, k)| (p, k * e)));
        }
        if fac.is_empty() {
            return Self::from_poly(num);
        }
        let (basis, exps) = common_basis(&[&fac]);
        let (exps, c) = exps.into_iter().next().expect("one list");
        let num = num.scale(&c.inv().expect("nonzero"));
        Self::reduced(num, basis.into_iter().zip(exps).collect())
    }

    /// Cancels basis factors that divide the numerator.
    fn reduced(mut num: Poly, fac: Vec<(Poly, u32)>) -> Self {
        if num.is_zero() {
            return Self::zero(num.ring());
        }
        let mut out = Vec::with_capacity(fac.len());
        for (f, mut e) in fac {
            while e > 0 {
                match num.div_exact(&f) {
                    Some(q) => {
                        num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                out.push((f, e));
            }
        }
        Self { num, fac: out, den: OnceLock::new() }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    /// The expanded denominator.
    pub fn denom(&self) -> &Poly {
        self.den.get_or_init(|| product(self.num.ring(), &self.fac))
    }

    /// Denominator factors with multiplicities.
    pub fn denom_factors(&self) -> &[(Poly, u32)] {
        &self.fac
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.num.ring()
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.fac.is_empty() && self.num.is_one()
    }

    pub fn as_poly(&self) -> Option<Poly> {
        if self.fac.is_empty() {
            Some(self.num.clone())
        } else {
            self.num.div_exact(self.denom())
        }
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        if self.fac.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn lift(&self, ring: &Arc<Ring>) -> RatFunc {
        if Arc::ptr_eq(self.ring(), ring) {
            return self.clone();
        }
        Self { num: self.num.lift(ring), fac: self.fac.iter().map(|(f, e)| (f.lift(ring), *e)).collect(), den: OnceLock::new() }
    }

    fn joined(&self, o: &RatFunc) -> Result<(RatFunc, RatFunc)> {
        if Arc::ptr_eq(self.ring(), o.ring()) {
            return Ok((self.clone(), o.clone()));
        }
        let r = Ring::join(self.ring(), o.ring())?;
        Ok((self.lift(&r), o.lift(&r)))
    }

    /// Both fractions over a common factor basis: `(basis, e_a, e_b)` with the
    /// numerators rescaled by the leftover constants.
    fn aligned(a: &RatFunc, b: &RatFunc) -> (Vec<Poly>, Poly, Vec<u32>, Poly, Vec<u32>) {
        if a.fac.len() == b.fac.len() && a.fac.iter().zip(&b.fac).all(|(x, y)| x.0 == y.0) {
            let basis = a.fac.iter().map(|(f, _)| f.clone()).collect();
            return (
                basis,
                a.num.clone(),
                a.fac.iter().map(|x| x.1).collect(),
                b.num.clone(),
                b.fac.iter().map(|x| x.1).collect(),
            );
        }
        let (basis, mut ex) = common_basis(&[&a.fac, &b.fac]);
        let (eb, cb) = ex.pop().expect("two lists");
        let (ea, ca) = ex.pop().expect("two lists");
        let na = a.num.scale(&ca.inv().expect("nonzero"));
        let nb = b.num.scale(&cb.inv().expect("nonzero"));
        (basis, na, ea, nb, eb)
    }

    pub fn checked_add(&self, o: &RatFunc) -> Result<RatFunc> {
        let (a, b) = self.joined(o)?;
        if a.is_zero() {
            return Ok(b);
        }
        if b.is_zero() {
            return Ok(a);
        }
        if a.fac.is_empty() && b.fac.is_empty() {
            return Ok(Self::from_poly(&a.num + &b.num));
        }
        let ring = a.ring().clone();
        let (basis, na, ea, nb, eb) = Self::aligned(&a, &b);
        let top: Vec<u32> = ea.iter().zip(&eb).map(|(x, y)| *x.max(y)).collect();
        let cofactor = |e: &[u32]| -> Poly {
            basis.iter().zip(top.iter().zip(e)).fold(
                Poly::one(&ring),
                |acc, (f, (t, k))| {
                    if t > k {
                        &acc * &f.pow(t - k)
                    } else {
                        acc
                    }
                },
            )
        };
        let num = &(&na * &cofactor(&ea)) + &(&nb * &cofactor(&eb));
        Ok(Self::reduced(num, basis.into_iter().zip(top).collect()))
    }

    pub fn checked_sub(&self, o: &RatFunc) -> Result<RatFunc> {
        self.checked_add(&o.neg_ref())
    }

    pub fn checked_mul(&self, o: &RatFunc) -> Result<RatFunc> {
        let (a, b) = self.joined(o)?;
        if a.is_zero() || b.is_zero() {
            return Ok(Self::zero(a.ring()));
        }
        if a.fac.is_empty() && b.fac.is_empty() {
            return Ok(Self::from_poly(&a.num * &b.num));
        }
        if b.fac.is_empty() {
            return Ok(Self::reduced(&a.num * &b.num, a.fac.clone()));
        }
        if a.fac.is_empty() {
            return Ok(Self::reduced(&a.num * &b.num, b.fac.clone()));
        }
        let (basis, na, ea, nb, eb) = Self::aligned(&a, &b);
        let sum: Vec<u32> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
        Ok(Self::reduced(&na * &nb, basis.into_iter().zip(sum).collect()))
    }

    pub fn checked_div(&self, o: &RatFunc) -> Result<RatFunc> {
        self.checked_mul(&o.inv()?)
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_parts(self.denom().clone(), vec![(self.num.clone(), 1)]))
    }

    pub fn neg_ref(&self) -> RatFunc {
        Self { num: self.num.neg_ref(), fac: self.fac.clone(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &GaussRat) -> RatFunc {
        if c.is_zero() {
            return Self::zero(self.ring());
        }
        Self { num: self.num.scale(c), fac: self.fac.clone(), den: self.den.clone() }
    }

    pub fn mul_poly(&self, p: &Poly) -> RatFunc {
        self * &RatFunc::from_poly(p.clone())
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        if e == 0 {
            return Self::one(self.ring());
        }
        Self { num: self.num.pow(e), fac: self.fac.iter().map(|(f, k)| (f.clone(), k * e)).collect(), den: OnceLock::new() }
    }

    pub fn conj(&self) -> RatFunc {
        if self.fac.is_empty() {
            return Self::from_poly(self.num.conj());
        }
        Self::from_parts(self.num.conj(), self.fac.iter().map(|(f, e)| (f.conj(), *e)).collect())
    }

    pub fn is_real(&self) -> bool {
        *self == self.conj()
    }

    /// Logarithmic quotient rule over the factors.
    pub fn derive(&self, v: Var) -> RatFunc {
        let dn = self.num.derive(v);
        if self.fac.is_empty() {
            return Self::from_poly(dn);
        }
        let ring = self.ring().clone();
        let moving: Vec<(usize, Poly)> =
            self.fac.iter().enumerate().map(|(i, (f, _))| (i, f.derive(v))).filter(|(_, d)| !d.is_zero()).collect();
        if moving.is_empty() {
            return Self::reduced(dn, self.fac.clone());
        }
        let all = moving.iter().fold(Poly::one(&ring), |acc, (i, _)| &acc * &self.fac[*i].0);
        let mut num = &dn * &all;
        for (i, df) in &moving {
            let others = moving.iter().filter(|(j, _)| j != i).fold(Poly::one(&ring), |acc, (j, _)| &acc * &self.fac[*j].0);
            let k = GaussRat::from(self.fac[*i].1 as i64);
            num = &num - &(&(&self.num * df) * &others).scale(&k);
        }
        let mut fac = self.fac.clone();
        for (i, _) in &moving {
            fac[*i].1 += 1;
        }
        Self::reduced(num, fac)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        !self.derive(v).is_zero()
    }

    fn den_value(&self, point: &GroupPoint, gens: &[Complex64]) -> Complex64 {
        self.fac.iter().fold(Complex64::new(1.0, 0.0), |acc, (f, e)| acc * f.eval(point, gens).powu(*e))
    }

    pub fn eval(&self, point: &GroupPoint, expvals: &[Complex64]) -> Complex64 {
        let owned;
        let gens: &[Complex64] = if expvals.is_empty() && self.ring().n_gens() > 0 {
            owned = Poly::generator_values(self.ring(), point);
            &owned
        } else {
            expvals
        };
        self.num.eval(point, gens) / self.den_value(point, gens)
    }

    /// Like [`RatFunc::eval`] but reports a vanishing denominator.
    pub fn eval_checked(&self, point: &GroupPoint, expvals: &[Complex64]) -> Result<Complex64> {
        let owned;
        let gens: &[Complex64] = if expvals.is_empty() && self.ring().n_gens() > 0 {
            owned = Poly::generator_values(self.ring(), point);
            &owned
        } else {
            expvals
        };
        let d = self.den_value(point, gens);
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Pole(format!("denominator {} vanishes at {:?}", self.denom(), point)));
        }
        Ok(self.num.eval(point, gens) / d)
    }

    pub fn eval_with<S>(&self, vars: &[S], gens: &[S], gen_invs: &[S], konst: &dyn Fn(&GaussRat) -> S) -> S
    where
        S: Clone + Add<Output = S> + Mul<Output = S> + Div<Output = S>,
    {
        let n = self.num.eval_with(vars, gens, gen_invs, konst);
        let Some(((f0, e0), rest)) = self.fac.split_first() else {
            return n;
        };
        let power = |f: &Poly, e: u32| {
            let v = f.eval_with(vars, gens, gen_invs, konst);
            (1..e).fold(v.clone(), |acc, _| acc * v.clone())
        };
        let d = rest.iter().fold(power(f0, *e0), |acc, (f, e)| acc * power(f, *e));
        n / d
    }
}

impl PartialEq for RatFunc {
    fn eq(&self, o: &Self) -> bool {
        if self.fac.len() == o.fac.len() && self.fac.iter().zip(&o.fac).all(|(a, b)| a == b) {
            return self.num == o.num;
        }
        self.checked_sub(o).is_ok_and(|d| d.is_zero())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.fac.is_empty() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.denom())
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl<'a> Add<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        self.checked_add(o).expect("fraction ring mismatch")
    }
}

impl<'a> Sub<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self.checked_sub(o).expect("fraction ring mismatch")
    }
}

impl<'a> Mul<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        self.checked_mul(o).expect("fraction ring mismatch")
    }
}

impl<'a> Div<&'a RatFunc> for &'a RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self.checked_div(o).expect("division by the zero fraction")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

macro_rules! forward_rf {
    ($tr:ident, $m:ident) => {
        impl $tr<RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a RatFunc> for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                (&self).$m(o)
            }
        }
    };
}
forward_rf!(Add, add);
forward_rf!(Sub, sub);
forward_rf!(Mul, mul);
forward_rf!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_quotient_is_one() {
        let r = Ring::base(1);
        let z = RatFunc::var(&r, Var::Z(0));
        assert!((&z / &z).is_one());
    }

    #[test]
    fn cross_multiplied_equality() {
        let r = Ring::base(1);
        let z = Poly::var(&r, Var::Z(0));
        let zb = Poly::var(&r, Var::Zbar(0));
        let a = RatFunc::new(z.clone(), zb.clone()).unwrap();
        let b = RatFunc::new(&z * &zb, zb.pow(2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, RatFunc::from_poly(z));
    }

    #[test]
    fn inversion_denominator_identity() {
        // 1/(-|z|²+it) · 1/(-|z|²-it) = 1/(|z|⁴+t²)
        let r = Ring::base(1);
        let z = Poly::var(&r, Var::Z(0));
        let zb = Poly::var(&r, Var::Zbar(0));
        let t = Poly::var(&r, Var::T);
        let q = -(&z * &zb);
        let it = t.scale(&GaussRat::i());
        let a = RatFunc::new(Poly::one(&r), &q + &it).unwrap();
        let b = a.conj();
        let gauge4 = &(&z * &zb).pow(2) + &t.pow(2);
        assert_eq!(&a * &b, RatFunc::new(Poly::one(&r), gauge4).unwrap());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let r = Ring::base(1);
        assert_eq!(RatFunc::one(&r).checked_div(&RatFunc::zero(&r)).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn quotient_rule() {
        let r = Ring::base(1);
        let z = Poly::var(&r, Var::Z(0));
        let one = Poly::one(&r);
        let f = RatFunc::new(one.clone(), &one + &z).unwrap();
        let df = f.derive(Var::Z(0));
        let expect = RatFunc::new(-one.clone(), (&one + &z).pow(2)).unwrap();
        assert_eq!(df, expect);
    }
}
