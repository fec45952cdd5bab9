use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{Jet, JetSpace, RationalMap};
use crate::point::GroupPoint;

/// Tabulated `max |D^{(s)}φ^j|` with its fitted exponential trend.
#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub s: usize,
    pub eta: f64,
    /// `table[j − 1]` is the max over samples and components at iterate `j`.
    pub table: Vec<f64>,
    /// Fitted `ρ` in `M(j) ≈ C j^d ρ^j`; `None` when the table vanishes.
    pub rate: Option<f64>,
    /// Fitted polynomial degree `d ∈ [0, s]`.
    pub degree: f64,
    /// Smallest `C` with `M(j) ≤ C j^d η^{j−s+1}` for all tabulated `j`.
    pub envelope: f64,
    /// Max relative deviation of the fitted half of the table from the trend.
    pub fit_error: f64,
    pub pass: bool,
}

const RATE_SLACK: f64 = 1.05;

fn is_polynomial(map: &RationalMap) -> bool {
    map.components().iter().all(|f| f.denom().as_constant().is_some())
}

fn derivative_sup(w: &[Jet], s_comp: &Jet, s: usize) -> f64 {
    w.iter().chain(std::iter::once(s_comp)).flat_map(|c| c.derivatives_of_order(s)).map(|(_, d)| d.norm()).fold(0.0, f64::max)
}

fn table_at(map: &RationalMap, x: &GroupPoint, s: usize, jmax: usize) -> Vec<f64> {
    let n = map.n_src();
    let space = JetSpace::new(2 * n + 1, s);
    let i = Complex64::new(0.0, 1.0);
    let mut z: Vec<Jet> = (0..n)
        .map(|a| &Jet::variable(&space, 2 * a, x.z[a].re) + &Jet::variable(&space, 2 * a + 1, x.z[a].im).scale(i))
        .collect();
    let mut t = Jet::variable(&space, 2 * n, x.t);
    let mut out = Vec::with_capacity(jmax);
    for _ in 0..jmax {
        let (w, s_comp) = map.apply_jets(&space, &z, &t);
        out.push(derivative_sup(&w, &s_comp, s));
        z = w;
        t = s_comp;
    }
    out
}

/// Least squares for `ln M = a + d ln j + j ln ρ`, with `d` clamped to `[0, s]`.
fn fit(points: &[(f64, f64)], s: usize) -> (f64, f64, f64) {
    let solve = |d_fixed: Option<f64>| -> (f64, f64, f64) {
        let cols = if d_fixed.is_some() { 2 } else { 3 };
        let m = DMatrix::from_fn(points.len(), cols, |r, c| match c {
            0 => 1.0,
            1 => points[r].0,
            _ => points[r].0.ln(),
        });
        let y = DVector::from_fn(points.len(), |r, _| points[r].1 - d_fixed.map_or(0.0, |d| d * points[r].0.ln()));
        let sol = m.svd(true, true).solve(&y, 1e-12).expect("least squares");
        (sol[0], sol[1], d_fixed.unwrap_or_else(|| sol[2]))
    };
    let (a, lr, d) = if points.len() >= 4 { solve(None) } else { solve(Some(0.0)) };
    if (0.0..=s as f64).contains(&d) {
        (a, lr, d)
    } else {
        solve(Some(d.clamp(0.0, s as f64)))
    }
}

/// Tabulates order-`s` derivatives of `φ^j` for `j ≤ jmax` over the samples
/// and tests that the exponential rate is at most `η` (within 5%) once a
/// polynomial factor of degree at most `s` is divided out.
pub fn derivative_growth_check(
    map: &RationalMap,
    s: usize,
    jmax: usize,
    samples: &[GroupPoint],
    eta: f64,
) -> Result<GrowthReport> {
    if !(1..=3).contains(&s) {
        return Err(Error::Invalid("derivative order must be 1, 2 or 3".into()));
    }
    if !is_polynomial(map) {
        return Err(Error::Invalid("derivative growth needs a polynomial map".into()));
    }
    if jmax == 0 || samples.is_empty() {
        return Err(Error::Invalid("need jmax ≥ 1 and at least one sample".into()));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Invalid("η must be positive".into()));
    }
    let per: Vec<Vec<f64>> = samples.par_iter().map(|x| table_at(map, x, s, jmax)).collect();
    let table: Vec<f64> = (0..jmax).map(|j| per.iter().map(|r| r[j]).fold(0.0, f64::max)).collect();
    let top = table.iter().copied().fold(0.0, f64::max);
    let all: Vec<(f64, f64)> = table
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > 1e-300 && **m > 1e-14 * top)
        .map(|(j, m)| ((j + 1) as f64, m.ln()))
        .collect();
    // the trend is fitted on the second half, past the transient
    let points = if all.len() >= 8 { all[all.len() / 2..].to_vec() } else { all };
    if points.len() < 2 {
        return Ok(GrowthReport { s, eta, table, rate: None, degree: 0.0, envelope: top / eta, fit_error: 0.0, pass: true });
    }
    let (a, lr, d) = fit(&points, s);
    let rate = lr.exp();
    let fit_error = points.iter().map(|(j, y)| (y - (a + d * j.ln() + j * lr)).exp() - 1.0).map(f64::abs).fold(0.0, f64::max);
    let envelope = table
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let j = (j + 1) as f64;
            m / (j.powf(d) * eta.powf(j - s as f64 + 1.0))
        })
        .fold(0.0, f64::max);
    Ok(GrowthReport { s, eta, table, rate: Some(rate), degree: d, envelope, fit_error, pass: rate <= RATE_SLACK * eta })
}
