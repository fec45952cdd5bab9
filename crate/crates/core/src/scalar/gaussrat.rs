//! Gaussian rationals `a + b i` with `a, b ∈ ℚ`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact complex number with rational real and imaginary parts.
///
/// `BigRational` keeps both parts in lowest terms with a positive
/// denominator, so structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`. Panics on a zero denominator.
    pub fn from_fracs(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(BigRational::new(re_num.into(), re_den.into()), BigRational::new(im_num.into(), im_den.into()))
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(num.into(), den.into()))
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|a|² = a·conj(a)`, always a nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        let d = self.norm_sqr();
        if d.is_zero() {
            return None;
        }
        Some(Self::new(&self.re / &d, -&self.im / &d))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, negative exponents allowed for nonzero values.
    pub fn powi(&self, e: i32) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            self.inv().map(|x| x.pow(e.unsigned_abs()))
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Exact conversion of a finite double (every finite `f64` is a dyadic rational).
    pub fn from_f64_exact(re: f64, im: f64) -> Option<Self> {
        Some(Self::new(BigRational::from_float(re)?, BigRational::from_float(im)?))
    }

    /// Shortest-decimal conversion: `0.1` becomes `1/10` rather than its dyadic expansion.
    pub fn from_f64_decimal(re: f64, im: f64) -> Option<Self> {
        Some(Self::new(rat_from_decimal(re)?, rat_from_decimal(im)?))
    }

    /// Serialized as `[re_num, re_den, im_num, im_den]`.
    pub fn to_quad(&self) -> [BigInt; 4] {
        [self.re.numer().clone(), self.re.denom().clone(), self.im.numer().clone(), self.im.denom().clone()]
    }

    /// Parses the four decimal integer strings; denominators must be nonzero.
    pub fn from_quad(q: [BigInt; 4]) -> Option<Self> {
        let [a, b, c, d] = q;
        if b.is_zero() || d.is_zero() {
            return None;
        }
        Some(Self::new(BigRational::new(a, b), BigRational::new(c, d)))
    }
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // very large numerator/denominator: scale down both
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Parses the shortest round-tripping decimal representation of `x` exactly.
pub fn rat_from_decimal(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let s = format!("{:e}", x);
    let (mantissa, exp) = s.split_once('e')?;
    let exp: i64 = exp.parse().ok()?;
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches('-');
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Some(r)
}

impl Zero for GaussRat {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRat {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl<'a> Div<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &GaussRat) -> GaussRat {
        self * &o.inv().expect("division by zero Gaussian rational")
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-&self.re, -&self.im)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: GaussRat) -> GaussRat {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $m(self, o: &GaussRat) -> GaussRat {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&GaussRat> for GaussRat {
    fn add_assign(&mut self, o: &GaussRat) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRat> for GaussRat {
    fn sub_assign(&mut self, o: &GaussRat) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRat> for GaussRat {
    fn mul_assign(&mut self, o: &GaussRat) {
        *self = &*self * o;
    }
}

impl From<i64> for GaussRat {
    fn from(v: i64) -> Self {
        GaussRat::from_ints(v, 0)
    }
}

impl From<BigRational> for GaussRat {
    fn from(v: BigRational) -> Self {
        GaussRat::real(v)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({}-{}i)", self.re, -self.im.clone())
                } else {
                    write!(f, "({}+{}i)", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugation_is_an_involution_and_norm_is_real() {
        let a = GaussRat::from_fracs(3, 4, -5, 6);
        assert_eq!(a.conj().conj(), a);
        let n = &a * &a.conj();
        assert!(n.is_real());
        assert_eq!(n.re, a.norm_sqr());
    }

    #[test]
    fn lowest_terms_and_positive_denominators() {
        let a = GaussRat::from_fracs(2, -4, 6, 8);
        assert_eq!(a.re, BigRational::new((-1).into(), 2.into()));
        assert_eq!(a.im, BigRational::new(3.into(), 4.into()));
        assert!(a.re.denom().is_positive());
    }

    #[test]
    fn inverse_and_division() {
        let a = GaussRat::from_ints(1, 1);
        let inv = a.inv().unwrap();
        assert_eq!(&a * &inv, GaussRat::one());
        assert!(GaussRat::zero().inv().is_none());
        assert_eq!(a.powi(-2).unwrap(), GaussRat::from_fracs(0, 1, -1, 2));
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(rat_from_decimal(0.1).unwrap(), BigRational::new(1.into(), 10.into()));
        assert_eq!(rat_from_decimal(-2.5e3).unwrap(), BigRational::from_integer((-2500).into()));
        assert_eq!(rat_from_decimal(0.0).unwrap(), BigRational::zero());
        assert!(rat_from_decimal(f64::NAN).is_none());
    }
}
