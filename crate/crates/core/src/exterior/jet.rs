//! Truncated multivariate Taylor expansions over `ℂ` in real variables.

use std::collections::HashMap;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

/// Multi-index bookkeeping shared by all jets of one shape.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: usize,
    monos: Vec<Vec<u8>>,
    table: Vec<(usize, usize, usize)>,
}

impl JetSpace {
    pub fn new(nvars: usize, order: usize) -> Arc<Self> {
        let mut monos: Vec<Vec<u8>> = vec![vec![0; nvars]];
        let mut frontier = monos.clone();
        for _ in 0..order {
            let mut next = Vec::new();
            for m in &frontier {
                let last = m.iter().rposition(|&e| e > 0).unwrap_or(0);
                for v in last..nvars {
                    let mut m2 = m.clone();
                    m2[v] += 1;
                    next.push(m2);
                }
            }
            monos.extend(next.iter().cloned());
            frontier = next;
        }
        let index: HashMap<Vec<u8>, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut table = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            let da: usize = a.iter().map(|&e| e as usize).sum();
            for (j, b) in monos.iter().enumerate() {
                let db: usize = b.iter().map(|&e| e as usize).sum();
                if da + db > order {
                    continue;
                }
                let s: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                table.push((i, j, index[&s]));
            }
        }
        Arc::new(Self { nvars, order, monos, table })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }
}

/// A jet `Σ c_m x^m` truncated at total degree `order`.
#[derive(Clone, Debug)]
pub struct Jet {
    space: Arc<JetSpace>,
    c: Vec<Complex64>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, v: Complex64) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); space.len()];
        c[0] = v;
        Self { space: space.clone(), c }
    }

    /// The real variable `x_k` expanded at `value`.
    pub fn variable(space: &Arc<JetSpace>, k: usize, value: f64) -> Self {
        let mut j = Self::constant(space, Complex64::new(value, 0.0));
        if space.order >= 1 {
            let idx = 1 + k;
            j.c[idx] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// The partial derivative `∂^m` at the expansion point.
    pub fn derivative(&self, m: &[u8]) -> Complex64 {
        let i = self.space.monos.iter().position(|x| x == m).expect("multi-index within order");
        let fact: f64 = m.iter().map(|&e| (1..=e as u64).product::<u64>() as f64).product();
        self.c[i] * fact
    }

    /// All `(multi-index, derivative)` pairs of total order `s`.
    pub fn derivatives_of_order(&self, s: usize) -> Vec<(Vec<u8>, Complex64)> {
        self.space
            .monos
            .iter()
            .filter(|m| m.iter().map(|&e| e as usize).sum::<usize>() == s)
            .map(|m| (m.clone(), self.derivative(m)))
            .collect()
    }

    pub fn conj(&self) -> Self {
        Self { space: self.space.clone(), c: self.c.iter().map(|x| x.conj()).collect() }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { space: self.space.clone(), c: self.c.iter().map(|x| x * a).collect() }
    }

    fn nilpotent(&self) -> Self {
        let mut u = self.clone();
        u.c[0] = Complex64::new(0.0, 0.0);
        u
    }

    /// Composes the series `Σ coef[k] u^k` with the nilpotent part `u`.
    fn series(&self, coef: &[Complex64]) -> Self {
        let u = self.nilpotent();
        let mut acc = Jet::constant(&self.space, coef[0]);
        let mut pow = Jet::constant(&self.space, Complex64::new(1.0, 0.0));
        for ck in coef.iter().skip(1) {
            pow = &pow * &u;
            acc = &acc + &pow.scale(*ck);
        }
        acc
    }

    pub fn recip(&self) -> Self {
        let b0 = self.c[0];
        let normalized = self.scale(1.0 / b0);
        let coef: Vec<Complex64> =
            (0..=self.space.order).map(|k| Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        normalized.series(&coef).scale(1.0 / b0)
    }

    pub fn exp(&self) -> Self {
        let e0 = self.c[0].exp();
        let mut coef = Vec::with_capacity(self.space.order + 1);
        let mut f = 1.0;
        for k in 0..=self.space.order {
            if k > 0 {
                f *= k as f64;
            }
            coef.push(Complex64::new(1.0 / f, 0.0));
        }
        self.series(&coef).scale(e0)
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet { space: self.space.clone(), c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let mut c = vec![Complex64::new(0.0, 0.0); self.c.len()];
        for &(i, j, k) in &self.space.table {
            c[k] += self.c[i] * o.c[j];
        }
        Jet { space: self.space.clone(), c }
    }
}

impl<'a> Div<&'a Jet> for &'a Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &Jet) -> Jet {
        self * &o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

macro_rules! forward_jet {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, o: Jet) -> Jet {
                (&self).$m(&o)
            }
        }
    };
}
forward_jet!(Add, add);
forward_jet!(Sub, sub);
forward_jet!(Mul, mul);
forward_jet!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_and_exp() {
        let sp = JetSpace::new(2, 3);
        let x = Jet::variable(&sp, 0, 0.5);
        let y = Jet::variable(&sp, 1, -1.0);
        let f = &(&x * &x) * &y;
        assert!((f.derivative(&[2, 1]) - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((f.derivative(&[1, 0]) - Complex64::new(-(2.0 * 0.5), 0.0)).norm() < 1e-14);
        let e = x.exp();
        assert!((e.derivative(&[3, 0]) - Complex64::new(0.5f64.exp(), 0.0)).norm() < 1e-13);
        let r = y.recip();
        // d²/dy² (1/y) = 2/y³
        assert!((r.derivative(&[0, 2]) - Complex64::new(-2.0, 0.0)).norm() < 1e-13);
    }
}
