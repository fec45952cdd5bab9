use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Canonical form `P = Wᵗ S W` with `W` unitary and `S` block diagonal,
/// blocks `[[0, σ_k], [−σ_k, 0]]` in decreasing `σ_k` followed by zeros.
#[derive(Clone, Debug)]
pub struct Youla {
    pub w: DMatrix<Complex64>,
    pub s: DMatrix<Complex64>,
    /// Singular values of `P`, descending, each nonzero one repeated twice.
    pub singular_values: Vec<f64>,
}

/// Outcome of comparing two skew matrices under unitary congruence.
#[derive(Clone, Debug)]
pub struct Congruence {
    pub equivalent: bool,
    /// `U` with `P = UᵗP'U` when equivalent.
    pub witness: Option<DMatrix<Complex64>>,
    pub residual: f64,
    pub sv_p: Vec<f64>,
    pub sv_pprime: Vec<f64>,
    pub max_gap: f64,
}

fn orthogonalize(v: &DVector<Complex64>, basis: &[DVector<Complex64>]) -> DVector<Complex64> {
    let mut x = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = b.dotc(&x);
            x -= b * c;
        }
    }
    x
}

/// Youla decomposition of a complex skew-symmetric matrix.
pub fn youla(p: &DMatrix<Complex64>) -> Result<Youla> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::Dimension("P must be square".into()));
    }
    let scale = p.norm().max(1.0);
    if (p + p.transpose()).norm() > 1e-10 * scale {
        return Err(Error::NotSkew("P^t != -P".into()));
    }
    let h = p.adjoint() * p;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let tol = 1e-10 * scale;
    let mut cols: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    let mut sigmas = Vec::new();
    let mut pending: Vec<DVector<Complex64>> = Vec::new();
    for &k in &order {
        let ev = eig.eigenvalues[k].max(0.0);
        let v = eig.eigenvectors.column(k).into_owned();
        if cols.len() + 1 >= n || ev.sqrt() <= tol {
            pending.push(v);
            continue;
        }
        let x = orthogonalize(&v, &cols);
        let nx = x.norm();
        if nx < 0.5 {
            continue;
        }
        let x = x / Complex64::new(nx, 0.0);
        let px = p * &x;
        let sigma = px.norm();
        if sigma <= tol {
            pending.push(x);
            continue;
        }
        let y = px.map(|c| c.conj()) / Complex64::new(sigma, 0.0);
        cols.push(y);
        cols.push(x);
        sigmas.push(sigma);
    }
    // complete with the kernel
    for v in pending.into_iter().chain(
        (0..n).map(|i| DVector::from_fn(n, |j, _| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })),
    ) {
        if cols.len() == n {
            break;
        }
        let x = orthogonalize(&v, &cols);
        let nx = x.norm();
        if nx > 0.5 {
            cols.push(x / Complex64::new(nx, 0.0));
        }
    }
    let v = DMatrix::from_columns(&cols);
    let s = v.transpose() * p * &v;
    let mut singular_values = Vec::with_capacity(n);
    for s in &sigmas {
        singular_values.push(*s);
        singular_values.push(*s);
    }
    singular_values.resize(n, 0.0);
    Ok(Youla { w: v.adjoint(), s, singular_values })
}

/// Decides whether `P = UᵗP'U` for some unitary `U`, comparing paired
/// singular values to `1e-8·max(1, σ_max)` and certifying the witness residual.
pub fn classify_congruence(p: &DMatrix<Complex64>, pprime: &DMatrix<Complex64>) -> Result<Congruence> {
    if p.shape() != pprime.shape() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", p.shape(), pprime.shape())));
    }
    let a = youla(p)?;
    let b = youla(pprime)?;
    let smax = a.singular_values.first().copied().unwrap_or(0.0).max(b.singular_values.first().copied().unwrap_or(0.0));
    let tol = 1e-8 * smax.max(1.0);
    let max_gap = a.singular_values.iter().zip(&b.singular_values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if max_gap > tol {
        return Ok(Congruence {
            equivalent: false,
            witness: None,
            residual: f64::NAN,
            sv_p: a.singular_values,
            sv_pprime: b.singular_values,
            max_gap,
        });
    }
    let u = b.w.adjoint() * &a.w;
    let residual = (p - u.transpose() * pprime * &u).norm();
    let equivalent = residual <= tol;
    Ok(Congruence {
        equivalent,
        witness: equivalent.then_some(u),
        residual,
        sv_p: a.singular_values,
        sv_pprime: b.singular_values,
        max_gap,
    })
}
