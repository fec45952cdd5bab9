//! Small dense matrices over [`GaussRat`].

use num_complex::Complex64;
use num_traits::{One, Zero};

use super::GaussRat;

pub type QMatrix = Vec<Vec<GaussRat>>;

pub fn identity(n: usize) -> QMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { GaussRat::one() } else { GaussRat::zero() }).collect()).collect()
}

pub fn zeros(n: usize) -> QMatrix {
    vec![vec![GaussRat::zero(); n]; n]
}

pub fn mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = GaussRat::zero();
                    for l in 0..k {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            s += &(&a[i][l] * &b[l][j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &QMatrix) -> QMatrix {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn adjoint(a: &QMatrix) -> QMatrix {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|row| row[j].conj()).collect()).collect()
}

pub fn add(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn sub(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

pub fn neg(a: &QMatrix) -> QMatrix {
    a.iter().map(|r| r.iter().map(|x| -x).collect()).collect()
}

pub fn is_skew(a: &QMatrix) -> bool {
    let n = a.len();
    (0..n).all(|i| a[i].len() == n && (0..n).all(|j| a[i][j] == -&a[j][i]))
}

pub fn is_unitary(a: &QMatrix) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n) && mul(&adjoint(a), a) == identity(n)
}

/// Exact inverse by Gauss–Jordan elimination.
pub fn inverse(a: &QMatrix) -> Option<QMatrix> {
    let n = a.len();
    let mut m: Vec<Vec<GaussRat>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { GaussRat::one() } else { GaussRat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].inv()?;
        for x in m[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..2 * n {
                    let d = &f * &m[c][k];
                    m[r][k] -= &d;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn to_complex(a: &QMatrix) -> Vec<Vec<Complex64>> {
    a.iter().map(|r| r.iter().map(GaussRat::to_complex).collect()).collect()
}

/// Cayley transform `(I − K)(I + K)⁻¹`, unitary whenever `K` is skew-Hermitian.
pub fn cayley(k: &QMatrix) -> QMatrix {
    let n = k.len();
    let id = identity(n);
    let inv = inverse(&add(&id, k)).expect("I + K is invertible for skew-Hermitian K");
    mul(&sub(&id, k), &inv)
}

/// The special unitary `[[a, −b̄], [b, ā]]` for a rational point `(a, b)` of the
/// unit sphere in `ℂ²`, obtained by inverse stereographic projection of `x ∈ ℚ³`.
pub fn su2_from_rational(x: [GaussRat; 3]) -> QMatrix {
    let [x1, x2, x3] = x;
    let r2 = &(&(&x1 * &x1) + &(&x2 * &x2)) + &(&x3 * &x3);
    let den = &GaussRat::one() + &r2;
    let inv = den.inv().expect("positive denominator");
    let two = GaussRat::from(2);
    let a = GaussRat::new((&(&two * &x1) * &inv).re, (&(&two * &x2) * &inv).re);
    let b = GaussRat::new((&(&two * &x3) * &inv).re, (&(&r2 - &GaussRat::one()) * &inv).re);
    vec![vec![a.clone(), -b.conj()], vec![b, a.conj()]]
}
