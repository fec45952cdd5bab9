//! Exact sparse Gauss–Jordan elimination over [`RatFunc`].

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::scalar::RatFunc;

/// One linear equation `Σ coeffs[j]·x_j = rhs`.
#[derive(Clone, Debug)]
pub struct Equation {
    pub coeffs: BTreeMap<usize, RatFunc>,
    pub rhs: RatFunc,
}

impl Equation {
    pub fn new(rhs: RatFunc) -> Self {
        Self { coeffs: BTreeMap::new(), rhs }
    }

    /// Adds `c·x_j` to the left-hand side.
    pub fn add_term(&mut self, j: usize, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        let merged = match self.coeffs.remove(&j) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.coeffs.insert(j, merged);
        }
    }
}

fn pivot_cost(c: &RatFunc) -> usize {
    if c.as_constant().is_some() {
        0
    } else {
        c.numer().n_terms() + c.denom().n_terms()
    }
}

/// Solves a possibly overdetermined system with a unique solution.
///
/// Redundant equations must reduce to `0 = 0` (else [`Error::Inconsistent`]);
/// an unknown left without a pivot gives [`Error::Singular`].
pub fn solve(n_unknowns: usize, equations: Vec<Equation>) -> Result<Vec<RatFunc>> {
    if equations.is_empty() {
        if n_unknowns == 0 {
            return Ok(Vec::new());
        }
        return Err(Error::Singular("no equations".into()));
    }
    let mut rows: Vec<Equation> = equations;
    for r in &rows {
        if let Some((&j, _)) = r.coeffs.iter().next_back() {
            if j >= n_unknowns {
                return Err(Error::Dimension(format!("unknown index {j} out of range")));
            }
        }
    }
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_unknowns];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.coeffs.keys() {
            col_rows[j].insert(i);
        }
    }
    let mut done_row = vec![false; rows.len()];
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n_unknowns];
    loop {
        // choose the sparsest open row, then its simplest entry
        let mut best: Option<(usize, usize, (usize, usize, usize))> = None;
        for (i, r) in rows.iter().enumerate() {
            if done_row[i] || r.coeffs.is_empty() {
                continue;
            }
            for (&j, c) in &r.coeffs {
                let key = (pivot_cost(c), r.coeffs.len(), col_rows[j].len());
                if best.as_ref().is_none_or(|b| key < b.2) {
                    best = Some((i, j, key));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        done_row[pi] = true;
        pivot_of_col[pj] = Some(pi);
        let inv = rows[pi].coeffs[&pj].inv()?;
        let prow = {
            let r = &rows[pi];
            let coeffs: BTreeMap<usize, RatFunc> = r.coeffs.iter().map(|(&j, c)| (j, c * &inv)).collect();
            Equation { coeffs, rhs: &r.rhs * &inv }
        };
        let targets: Vec<usize> = col_rows[pj].iter().copied().filter(|&i| i != pi).collect();
        for i in targets {
            let factor = rows[i].coeffs[&pj].clone();
            for (&j, c) in &prow.coeffs {
                let delta = c * &factor;
                let entry = rows[i].coeffs.remove(&j);
                let updated = match entry {
                    Some(old) => &old - &delta,
                    None => -delta,
                };
                if updated.is_zero() {
                    col_rows[j].remove(&i);
                } else {
                    col_rows[j].insert(i);
                    rows[i].coeffs.insert(j, updated);
                }
            }
            rows[i].rhs = &rows[i].rhs - &(&prow.rhs * &factor);
        }
        rows[pi] = prow;
    }
    for (i, r) in rows.iter().enumerate() {
        if !done_row[i] && r.coeffs.is_empty() && !r.rhs.is_zero() {
            return Err(Error::Inconsistent(format!("equation {i} reduces to 0 = {}", r.rhs)));
        }
    }
    let mut out = Vec::with_capacity(n_unknowns);
    for (j, p) in pivot_of_col.iter().enumerate() {
        let Some(i) = *p else {
            return Err(Error::Singular(format!("unknown {j} is not determined")));
        };
        out.push(rows[i].rhs.clone());
    }
    Ok(out)
}

/// Inverse of a square matrix of fractions.
pub fn invert(m: &[Vec<RatFunc>]) -> Result<Vec<Vec<RatFunc>>> {
    let k = m.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let ring = m[0][0].ring().clone();
    let mut out = vec![Vec::with_capacity(k); k];
    for col in 0..k {
        let eqs: Vec<Equation> = (0..k)
            .map(|i| {
                let rhs = if i == col { RatFunc::one(&ring) } else { RatFunc::zero(&ring) };
                let mut e = Equation::new(rhs);
                for (j, c) in m[i].iter().enumerate() {
                    e.add_term(j, c.clone());
                }
                e
            })
            .collect();
        let x = solve(k, eqs)?;
        for (i, v) in x.into_iter().enumerate() {
            out[i].push(v);
        }
    }
    Ok(out)
}
