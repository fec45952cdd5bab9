use crate::error::Result;
use crate::point::GroupPoint;
use crate::scalar::matrix::QMatrix;

use super::connection::{solve_connection, TensorSet};
use super::structure::PHStructure;
use super::tensor::metric_at;

/// Outcome of the local-equivalence test against a model.
#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub flat: bool,
    /// Names of tensors that do not vanish identically.
    pub nonvanishing: Vec<String>,
    /// The constant matrix carried by `p_{αβ}`, when it is constant.
    pub p: Option<QMatrix>,
}

const OBSTRUCTIONS: [&str; 6] = ["T", "N", "A", "B", "R", "p;gamma"];

/// Exact test: `∇p`, `T`, `N`, `A`, `B` and `R` vanish identically.
pub fn flatness_test(s: &PHStructure) -> Result<(FlatnessReport, TensorSet)> {
    let ts = solve_connection(s)?;
    Ok((flatness_of(s, &ts), ts))
}

pub fn flatness_of(s: &PHStructure, ts: &TensorSet) -> FlatnessReport {
    let nonvanishing: Vec<String> = ts
        .named()
        .into_iter()
        .filter(|(name, t)| OBSTRUCTIONS.contains(name) && !t.is_zero())
        .map(|(name, _)| name.to_string())
        .collect();
    let p: Option<QMatrix> = s.p.iter().map(|row| row.iter().map(|f| f.as_constant()).collect::<Option<Vec<_>>>()).collect();
    FlatnessReport { flat: nonvanishing.is_empty(), nonvanishing, p }
}

/// Sup over samples of the θ-norm of each obstruction tensor.
pub fn sup_norms(s: &PHStructure, ts: &TensorSet, samples: &[GroupPoint]) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (name, t) in ts.named() {
        if !OBSTRUCTIONS.contains(&name) {
            continue;
        }
        let mut sup: f64 = 0.0;
        for x in samples {
            let g = metric_at(&s.g, x);
            sup = sup.max(t.eval(x).norm(&g)?);
        }
        out.push((name.to_string(), sup));
    }
    Ok(out)
}

/// Numeric path: flat when every sup-norm is at most `tol`.
pub fn flatness_numeric(s: &PHStructure, ts: &TensorSet, samples: &[GroupPoint], tol: f64) -> Result<(bool, Vec<(String, f64)>)> {
    let norms = sup_norms(s, ts, samples)?;
    Ok((norms.iter().all(|(_, v)| *v <= tol), norms))
}
