use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{Form, RationalMap};
use crate::heisenberg::ModelSpec;
use crate::point::GroupPoint;
use crate::pseudoherm::{characteristic_field, PHStructure};
use crate::scalar::RatFunc;

use super::ContractionSpec;

const GAUGE_FLOOR: f64 = 1e-12;
const GAUGE_CEIL: f64 = 1e12;

/// Outcome of [`stable_manifold_test`].
#[derive(Clone, Debug)]
pub struct StableReport {
    pub stable: bool,
    /// Iterations until the gauge distance fell below [`gauge_floor`].
    pub steps: usize,
    /// Fitted decay constant of the gauge distance over the tail.
    pub eta: Option<f64>,
    pub gauges: Vec<f64>,
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Geometric rate of a positive sequence from its second half.
fn tail_rate(seq: &[(usize, f64)]) -> Option<f64> {
    if seq.len() < 2 {
        return None;
    }
    let tail = &seq[seq.len() / 2..];
    let tail = if tail.len() < 2 { &seq[seq.len() - 2..] } else { tail };
    let x: Vec<f64> = tail.iter().map(|(k, _)| *k as f64).collect();
    let y: Vec<f64> = tail.iter().map(|(_, d)| d.ln()).collect();
    Some(slope(&x, &y).exp())
}

/// `1e-12`, raised to the resolution of `o⁻¹·x` in floating point: the `t`
/// component cancels terms of size `|t_o| + |z_o|²`, so the gauge cannot
/// resolve less than about `√(ε(|t_o| + |z_o|²))`.
pub fn gauge_floor(o: &GroupPoint) -> f64 {
    GAUGE_FLOOR.max(100.0 * (f64::EPSILON * (o.t.abs() + o.z_norm_sqr())).sqrt())
}

fn gauge_from(model: &ModelSpec, o: &GroupPoint, x: &GroupPoint) -> f64 {
    model.mul(&model.inverse(o), x).gauge()
}

/// Iterates `φ` from `x` and measures the gauge distance to `o` after
/// translating `o` to the origin.
pub fn stable_manifold_test(spec: &ContractionSpec, x: &GroupPoint, kmax: usize) -> StableReport {
    let o = &spec.fixed;
    let mut gauges = vec![gauge_from(&spec.model, o, x)];
    let mut cur = x.clone();
    let floor = gauge_floor(o);
    let fail = |gauges: Vec<f64>| StableReport { stable: false, steps: gauges.len() - 1, eta: None, gauges };
    while gauges.last().is_some_and(|d| *d >= floor) {
        if gauges.len() > kmax {
            return fail(gauges);
        }
        cur = match spec.map.apply(&cur) {
            Ok(y) if y.is_finite() => y,
            _ => return fail(gauges),
        };
        let d = gauge_from(&spec.model, o, &cur);
        if !d.is_finite() || d > GAUGE_CEIL {
            gauges.push(d);
            return fail(gauges);
        }
        gauges.push(d);
    }
    let steps = gauges.len() - 1;
    let tail = &gauges[gauges.len() / 2..];
    if tail.windows(2).any(|w| w[1] >= w[0]) {
        return fail(gauges);
    }
    let seq: Vec<(usize, f64)> = gauges.iter().copied().enumerate().filter(|(_, d)| *d > 0.0).collect();
    let eta = tail_rate(&seq);
    StableReport { stable: true, steps, eta, gauges }
}

/// `v` with `φ^*θ̃ = vθ̃`, and whether that identity holds exactly.
pub fn multiplier_function(map: &RationalMap, theta: &Form) -> Result<(RatFunc, bool)> {
    let pb = map.pullback(theta)?;
    let tf = characteristic_field(theta)?;
    let v = pb.apply(&tf);
    let exact = pb.sub(&theta.scale(&v)).is_zero();
    Ok((v, exact))
}

/// `θ` with the coframe `dz^α − dz^α(T)θ` obtained by projecting the model coframe.
pub fn projected_structure(theta: &Form, model: &ModelSpec) -> Result<PHStructure> {
    let tf = characteristic_field(theta)?;
    let coframe: Vec<Form> = model
        .coframe()
        .iter()
        .map(|dz| {
            let dz = dz.lift(theta.ring());
            dz.sub(&theta.scale(&dz.apply(&tf)))
        })
        .collect();
    PHStructure::new(theta.clone(), coframe)
}

/// Outcome of [`canonical_contact_form`].
#[derive(Clone, Debug)]
pub struct IterationReport {
    pub samples: Vec<GroupPoint>,
    /// `u_0 = 1, u_1, …, u_K` at each sample.
    pub sequences: Vec<Vec<f64>>,
    pub limit: Vec<f64>,
    pub iterations: usize,
    /// Median over samples of the fitted rate of `|u_k − u_{k−1}|`.
    pub rate: Option<f64>,
    pub sample_rates: Vec<Option<f64>>,
    /// Median gauge decay constant of the sample orbits.
    pub eta: Option<f64>,
    /// `φ^*θ̃ = vθ̃` holds as an exact identity.
    pub pullback_exact: bool,
    /// Max `|φ^*θ̃ − vθ̃|` at the samples (tested on `∂t` and the real directions).
    pub pullback_residual: f64,
    /// Max over samples of `|u(φx)v(x)/μ − u(x)|`.
    pub canonical_residual: f64,
}

impl IterationReport {
    pub fn max_increment(&self) -> f64 {
        self.sequences.iter().filter(|&s| s.len() >= 2).map(|s| (s[s.len() - 1] - s[s.len() - 2]).abs()).fold(0.0, f64::max)
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

struct Run {
    seq: Vec<f64>,
    orbit: Vec<GroupPoint>,
    vals: Vec<f64>,
}

fn v_value(v: &RatFunc, x: &GroupPoint) -> Result<f64> {
    let c = v.eval_checked(x, &[])?;
    if c.im.abs() > 1e-10 * c.norm().max(1.0) || c.re <= 0.0 || !c.re.is_finite() {
        return Err(Error::Invalid(format!("φ^*θ̃/θ̃ = {c} is not positive at {x:?}")));
    }
    Ok(c.re)
}

/// Runs the product until the increment is below `tol`, or for exactly `fixed` steps.
fn run_sample(
    map: &RationalMap,
    v: &RatFunc,
    mu: f64,
    x: &GroupPoint,
    tol: f64,
    kmax: usize,
    fixed: Option<usize>,
) -> Result<Run> {
    let mut seq: Vec<f64> = vec![1.0];
    let mut orbit = vec![x.clone()];
    let mut vals = Vec::new();
    loop {
        let k = seq.len() - 1;
        let done = match fixed {
            Some(kk) => k >= kk,
            None => k >= 1 && (seq[k] - seq[k - 1]).abs() < tol,
        };
        if done {
            break;
        }
        if fixed.is_none() && k >= kmax {
            return Err(Error::NoConvergence(format!("|u_k − u_(k−1)| ≥ {tol:e} after {kmax} steps at {x:?}")));
        }
        let xk = orbit.last().expect("non-empty");
        let vk = v_value(v, xk)?;
        vals.push(vk);
        seq.push(seq[k] * vk / mu);
        let next = map.apply(xk)?;
        if !next.is_finite() {
            return Err(Error::Pole("orbit left the patch".into()));
        }
        orbit.push(next);
    }
    Ok(Run { seq, orbit, vals })
}

fn increment_rate(seq: &[f64]) -> Option<f64> {
    let pts: Vec<(usize, f64)> =
        (1..seq.len()).map(|k| (k, (seq[k] - seq[k - 1]).abs())).filter(|(k, d)| *d > 1e-13 * seq[*k].abs().max(1.0)).collect();
    if pts.len() < 3 {
        return None;
    }
    tail_rate(&pts)
}

/// `u = lim_k Π_{j≤k} v(φ^{j−1}x)/μ` at the samples, certified by the
/// Cauchy criterion, a geometric rate fit and the canonical equation.
pub fn canonical_contact_form(
    spec: &ContractionSpec,
    theta: &Form,
    samples: &[GroupPoint],
    tol: f64,
    kmax: usize,
) -> Result<IterationReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    if samples.is_empty() {
        return Err(Error::Invalid("no sample points".into()));
    }
    let n = spec.model.dim();
    if theta.dim() != n || samples.iter().any(|x| x.dim() != n) {
        return Err(Error::Dimension("θ̃ and samples must live on the model patch".into()));
    }
    let stable: Vec<StableReport> = samples.par_iter().map(|x| stable_manifold_test(spec, x, kmax.max(200))).collect();
    if let Some(i) = stable.iter().position(|s| !s.stable) {
        return Err(Error::Invalid(format!("sample {i} is not in the stable region")));
    }
    let (v, pullback_exact) = multiplier_function(&spec.map, theta)?;
    let pullback_residual = if pullback_exact { 0.0 } else { pullback_gap(&spec.map, theta, &v, samples)? };
    if pullback_residual > 1e-10 {
        return Err(Error::Invalid(format!("φ^*θ̃ is not a multiple of θ̃ (residual {pullback_residual:.3e})")));
    }
    let mu = spec.mu;
    let first: Vec<Run> = samples.par_iter().map(|x| run_sample(&spec.map, &v, mu, x, tol, kmax, None)).collect::<Result<_>>()?;
    let iterations = first.iter().map(|r| r.seq.len() - 1).max().unwrap_or(0);
    let runs: Vec<Run> =
        samples
            .par_iter()
            .zip(first)
            .map(|(x, r)| {
                if r.seq.len() - 1 == iterations {
                    Ok(r)
                } else {
                    run_sample(&spec.map, &v, mu, x, tol, kmax, Some(iterations))
                }
            })
            .collect::<Result<_>>()?;
    let sample_rates: Vec<Option<f64>> = runs.iter().map(|r| increment_rate(&r.seq)).collect();
    if let Some(i) = sample_rates.iter().position(|r| r.is_some_and(|r| !(r > 0.0 && r < 1.0))) {
        return Err(Error::NoConvergence(format!("non-geometric tail at sample {i}")));
    }
    let rate = median(sample_rates.iter().flatten().copied().collect());
    let mut canonical_residual: f64 = 0.0;
    for r in &runs {
        let k = r.seq.len() - 1;
        let u = r.seq[k];
        if k == 0 {
            continue;
        }
        // u(φx) from the shifted orbit x_1 … x_K
        let last = v_value(&v, &r.orbit[k])?;
        let mut u_phi = 1.0;
        for vj in r.vals[1..].iter().chain(std::iter::once(&last)) {
            u_phi *= vj / mu;
        }
        canonical_residual = canonical_residual.max((u_phi * r.vals[0] / mu - u).abs());
    }
    if canonical_residual > tol {
        return Err(Error::NoConvergence(format!("φ^*(uθ̃) − μuθ̃ = {canonical_residual:.3e} exceeds {tol:e}")));
    }
    let eta = median(stable.iter().filter_map(|s| s.eta).collect());
    let limit = runs.iter().map(|r| *r.seq.last().expect("non-empty")).collect();
    Ok(IterationReport {
        samples: samples.to_vec(),
        sequences: runs.into_iter().map(|r| r.seq).collect(),
        limit,
        iterations,
        rate,
        sample_rates,
        eta,
        pullback_exact,
        pullback_residual,
        canonical_residual,
    })
}

fn pullback_gap(map: &RationalMap, theta: &Form, v: &RatFunc, samples: &[GroupPoint]) -> Result<f64> {
    let pb = map.pullback(theta)?;
    let gap = pb.sub(&theta.scale(v));
    let n = theta.dim();
    let mut sup: f64 = 0.0;
    for x in samples {
        for k in 0..=2 * n {
            sup = sup.max(gap.eval_at(x, &[super::real_direction(n, k)]).norm());
        }
    }
    Ok(sup)
}
