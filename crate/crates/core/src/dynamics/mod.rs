//! Contracting CR automorphisms of Heisenberg models: multipliers, the
//! fixed-point normalization, canonical contact forms and flatness along the
//! stable manifold.

mod canonical;
mod growth;
mod pipeline;

pub use canonical::{
    canonical_contact_form, multiplier_function, projected_structure, stable_manifold_test, IterationReport, StableReport,
};
pub use growth::{derivative_growth_check, GrowthReport};
pub use pipeline::{theorem_main_pipeline, DecayFit, DecayStatus, PipelineReport};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::conformal::{transform_coframe, ConformalChange};
use crate::error::{Error, Result};
use crate::exterior::{Form, RationalMap};
use crate::heisenberg::{ExactPoint, ModelSpec};
use crate::point::GroupPoint;
use crate::pseudoherm::{Dir, PHStructure};
use crate::scalar::matrix::QMatrix;
use crate::scalar::{rat_to_f64, GaussRat, Poly, Var};

const FIXED_TOL: f64 = 1e-10;
const MULTIPLIER_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-8;

/// A contraction `φ` of a model with fixed point `o` and multiplier `μ ∈ (0, 1)`.
#[derive(Clone, Debug)]
pub struct ContractionSpec {
    pub model: ModelSpec,
    pub map: RationalMap,
    pub fixed: GroupPoint,
    pub mu: f64,
    /// `μ` as an exact rational when the map was composed from exact data.
    pub mu_exact: Option<BigRational>,
}

/// Numeric checks behind [`ContractionSpec::validate`].
#[derive(Clone, Debug)]
pub struct ContractionCheck {
    pub fixed_residual: f64,
    pub multiplier: f64,
    pub eigen_moduli: Vec<f64>,
    pub eigen_residual: f64,
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

impl ContractionSpec {
    /// `φ = L_q ∘ Λ ∘ U ∘ L_{q⁻¹}` with `Λ(z, t) = (λz, λ²t)`. When `μ` is not
    /// a rational square, `λ` is the binary fraction nearest `√μ` and `μ := λ²`.
    pub fn composed(model: &ModelSpec, q: &ExactPoint, u: Option<&QMatrix>, mu: &BigRational) -> Result<Self> {
        if !(mu.is_positive() && mu < &BigRational::one()) {
            return Err(Error::Invalid("multiplier must lie in (0, 1)".into()));
        }
        let lambda = match rational_sqrt(mu) {
            Some(l) => l,
            None => {
                BigRational::from_float(rat_to_f64(mu).sqrt()).ok_or_else(|| Error::Invalid("multiplier is not finite".into()))?
            }
        };
        let mu_exact = &lambda * &lambda;
        let mut phi = model.dilation(&lambda)?;
        if let Some(u) = u {
            let iso = model.isotropy(u)?;
            if !iso.valid {
                return Err(Error::Invalid("U does not preserve P".into()));
            }
            phi = phi.compose(&iso.map)?;
        }
        let phi = model.left_translation(q).compose(&phi.compose(&model.left_translation(&model.inverse_exact(q)))?)?;
        let spec = ContractionSpec {
            model: model.clone(),
            map: phi,
            fixed: q.to_point(),
            mu: rat_to_f64(&mu_exact),
            mu_exact: Some(mu_exact),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// A map given by its components; validated against the declared `μ`.
    pub fn raw(model: &ModelSpec, map: RationalMap, fixed: GroupPoint, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::Invalid("multiplier must lie in (0, 1)".into()));
        }
        if map.n_src() != model.dim() || map.n_dst() != model.dim() || fixed.dim() != model.dim() {
            return Err(Error::Dimension("map, fixed point and model must share n".into()));
        }
        let spec = ContractionSpec { model: model.clone(), map, fixed, mu, mu_exact: None };
        spec.validate()?;
        Ok(spec)
    }

    /// `φ(o) = o`, `φ^*θ_P|_o = μθ_P|_o` and `|eig(A)| = √μ` at `o`.
    pub fn validate(&self) -> Result<ContractionCheck> {
        let image = self.map.apply(&self.fixed)?;
        let fixed_residual = image.max_abs_diff(&self.fixed);
        if fixed_residual > FIXED_TOL {
            return Err(Error::NotFixed(format!("|φ(o) − o| = {fixed_residual:.3e}")));
        }
        let s = PHStructure::new(self.model.contact_form(), self.model.coframe())?;
        let h = horizontal_data(&self.map, &s, &self.fixed)?;
        if (h.mu - self.mu).abs() > MULTIPLIER_TOL {
            return Err(Error::Invalid(format!("measured multiplier {} differs from declared {}", h.mu, self.mu)));
        }
        let eigen_moduli = eigen_moduli(&h.a)?;
        let root = self.mu.sqrt();
        let eigen_residual = eigen_moduli.iter().map(|m| (m - root).abs()).fold(0.0, f64::max);
        if eigen_residual > EIGEN_TOL {
            return Err(Error::Invalid(format!("horizontal eigenvalue moduli deviate from √μ by {eigen_residual:.3e}")));
        }
        Ok(ContractionCheck { fixed_residual, multiplier: h.mu, eigen_moduli, eigen_residual })
    }
}

fn eigen_moduli(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let ev =
        a.clone().schur().eigenvalues().ok_or_else(|| Error::Degenerate("eigenvalues of the horizontal differential".into()))?;
    let mut m: Vec<f64> = ev.iter().map(|c| c.norm()).collect();
    m.sort_by(f64::total_cmp);
    Ok(m)
}

/// Complex components of the real coordinate directions `∂x_a`, `∂y_a`, `∂t`
/// in the basis `(∂z, ∂z̄, ∂t)`.
pub(crate) fn real_direction(n: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    if k == 2 * n {
        v[2 * n] = Complex64::new(1.0, 0.0);
    } else if k.is_multiple_of(2) {
        v[k / 2] = Complex64::new(1.0, 0.0);
        v[n + k / 2] = Complex64::new(1.0, 0.0);
    } else {
        v[k / 2] = Complex64::new(0.0, 1.0);
        v[n + k / 2] = Complex64::new(0.0, -1.0);
    }
    v
}

fn ensure_fixed(map: &RationalMap, o: &GroupPoint) -> Result<()> {
    let d = map.apply(o)?.max_abs_diff(o);
    if d > FIXED_TOL {
        return Err(Error::NotFixed(format!("|φ(o) − o| = {d:.3e}")));
    }
    Ok(())
}

fn multiplier_of_pullback(pb: &Form, theta: &Form, o: &GroupPoint) -> Result<f64> {
    let n = theta.dim();
    let mut choices = vec![real_direction(n, 2 * n)];
    if n > 0 {
        for k in 0..2 {
            let mut w = real_direction(n, 2 * n);
            for (a, b) in w.iter_mut().zip(real_direction(n, k)) {
                *a += b;
            }
            choices.push(w);
        }
    } else {
        choices.push(real_direction(0, 0).iter().map(|c| c * 2.0).collect());
        choices.push(real_direction(0, 0).iter().map(|c| c * -3.0).collect());
    }
    let scale = (0..=2 * n).map(|k| theta.eval_at(o, &[real_direction(n, k)]).norm()).fold(0.0, f64::max);
    let mut ratios = Vec::new();
    for w in &choices {
        let den = theta.eval_at(o, std::slice::from_ref(w));
        if den.norm() <= 1e-12 * scale.max(1e-300) {
            continue;
        }
        ratios.push(pb.eval_at(o, std::slice::from_ref(w)) / den);
    }
    let first = *ratios.first().ok_or_else(|| Error::Degenerate("θ vanishes at o".into()))?;
    let spread = ratios.iter().map(|r| (r - first).norm()).fold(0.0, f64::max);
    if spread > MULTIPLIER_TOL * first.norm().max(1.0) {
        return Err(Error::Degenerate(format!("φ^*θ|_o is not a multiple of θ|_o (spread {spread:.3e})")));
    }
    if first.im.abs() > MULTIPLIER_TOL * first.norm().max(1.0) {
        return Err(Error::Degenerate("multiplier is not real".into()));
    }
    Ok(first.re)
}

/// `μ = (φ^*θ)(W)|_o / θ(W)|_o`, checked to agree on three choices of `W`.
pub fn contraction_multiplier(map: &RationalMap, theta: &Form, o: &GroupPoint) -> Result<f64> {
    ensure_fixed(map, o)?;
    let pb = map.pullback(theta)?;
    multiplier_of_pullback(&pb, theta, o)
}

/// `φ^*θ^α = a^α_β θ^β + c^α θ` at `o`, with the multiplier.
#[derive(Clone, Debug)]
pub struct HorizontalData {
    /// `a[(α, β)] = a^α_β`.
    pub a: DMatrix<Complex64>,
    pub c: DVector<Complex64>,
    /// Max `|φ^*θ^α(Z_β̄)|` at `o`, zero for a CR map.
    pub antiholomorphic: f64,
    pub mu: f64,
}

pub fn horizontal_data(map: &RationalMap, s: &PHStructure, o: &GroupPoint) -> Result<HorizontalData> {
    ensure_fixed(map, o)?;
    let n = s.n;
    let mu = multiplier_of_pullback(&map.pullback(&s.theta)?, &s.theta, o)?;
    let zs: Vec<Vec<Complex64>> = (0..n).map(|b| s.field(Dir::Z(b)).eval(o)).collect();
    let zbs: Vec<Vec<Complex64>> = (0..n).map(|b| s.field(Dir::Zb(b)).eval(o)).collect();
    let tf = s.t_field.eval(o);
    let mut a = DMatrix::zeros(n, n);
    let mut c = DVector::zeros(n);
    let mut anti: f64 = 0.0;
    for al in 0..n {
        let pb = map.pullback(&s.coframe[al])?;
        for b in 0..n {
            a[(al, b)] = pb.eval_at(o, std::slice::from_ref(&zs[b]));
            anti = anti.max(pb.eval_at(o, std::slice::from_ref(&zbs[b])).norm());
        }
        c[al] = pb.eval_at(o, std::slice::from_ref(&tf));
    }
    Ok(HorizontalData { a, c, antiholomorphic: anti, mu })
}

/// Solves `(A − μI)v = c`.
pub fn solve_normalization(a: &DMatrix<Complex64>, c: &DVector<Complex64>, mu: f64) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    if a.ncols() != n || c.len() != n {
        return Err(Error::Dimension("A must be square and match c".into()));
    }
    if n == 0 {
        return Ok(DVector::zeros(0));
    }
    let m = a - DMatrix::identity(n, n) * Complex64::new(mu, 0.0);
    let sv = m.clone().svd(false, false).singular_values;
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smin <= 1e-12 * smax.max(1.0) {
        return Err(Error::Singular(format!("A − μI has smallest singular value {smin:.3e}")));
    }
    m.lu().solve(c).ok_or_else(|| Error::Singular("A − μI".into()))
}

/// Outcome of [`normalize_at_fixed_point`].
#[derive(Clone, Debug)]
pub struct Normalization {
    pub data: HorizontalData,
    pub v: DVector<Complex64>,
    /// `‖(A − μI)v − c‖`.
    pub residual: f64,
}

/// The vector `v` at `o` removing the `θ` component of `φ^*θ^α`.
pub fn normalize_at_fixed_point(map: &RationalMap, s: &PHStructure, o: &GroupPoint) -> Result<Normalization> {
    let data = horizontal_data(map, s, o)?;
    let v = solve_normalization(&data.a, &data.c, data.mu)?;
    let n = s.n;
    let m = &data.a - DMatrix::identity(n, n) * Complex64::new(data.mu, 0.0);
    let residual = (&m * &v - &data.c).norm();
    Ok(Normalization { data, v, residual })
}

/// The conformal gauge realizing a normalization.
#[derive(Clone, Debug)]
pub struct Regauge {
    /// Real affine `f` with `f(o) = 0`, `Tf(o) = 0` and `v^α(o)` as prescribed.
    pub f: Poly,
    pub structure: PHStructure,
    /// `c^α` of the regauged structure at `o`.
    pub c_after: DVector<Complex64>,
}

/// Builds `θ̃ = e^{2f}θ` whose coframe has `c̃^α(o) = 0`.
pub fn regauge_at_fixed_point(map: &RationalMap, s: &PHStructure, o: &GroupPoint, norm: &Normalization) -> Result<Regauge> {
    let n = s.n;
    let g = DMatrix::from_fn(n, n, |a, b| s.g[a][b].eval(o, &[]));
    let p = DMatrix::from_fn(n, n, |a, b| s.p[a][b].eval(o, &[]));
    let v = &norm.v;
    let i = Complex64::new(0.0, 1.0);
    // f_α = i v_α + p_{αβ} v^β with v_α = g_{αβ̄} v^β̄
    let target: Vec<Complex64> = (0..n)
        .map(|a| {
            let vl: Complex64 = (0..n).map(|b| g[(a, b)] * v[b].conj()).sum();
            let pv: Complex64 = (0..n).map(|b| p[(a, b)] * v[b]).sum();
            i * vl + pv
        })
        .collect();
    let dim = 2 * n + 1;
    let zs: Vec<Vec<Complex64>> = (0..n).map(|a| s.field(Dir::Z(a)).eval(o)).collect();
    let tf = s.t_field.eval(o);
    let apply = |field: &[Complex64], k: usize| -> Complex64 {
        // X(x_k) for the real coordinate x_k
        real_direction(n, k).iter().zip(field).fold(Complex64::new(0.0, 0.0), |acc, (d, c)| acc + c * d.conj() * 0.5)
    };
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for a in 0..n {
        for k in 0..dim {
            let val = if k == 2 * n { zs[a][2 * n] } else { apply(&zs[a], k) };
            m[(2 * a, k)] = val.re;
            m[(2 * a + 1, k)] = val.im;
        }
        rhs[2 * a] = target[a].re;
        rhs[2 * a + 1] = target[a].im;
    }
    for k in 0..dim {
        m[(2 * n, k)] = if k == 2 * n { tf[2 * n].re } else { apply(&tf, k).re };
    }
    let r = m.lu().solve(&rhs).ok_or_else(|| Error::Singular("gauge system".into()))?;
    let base = crate::scalar::Ring::base(n);
    let exact = |x: f64| GaussRat::from_f64_exact(x, 0.0).ok_or_else(|| Error::Invalid("non-finite gauge".into()));
    let mut f = Poly::zero(&base);
    let half = GaussRat::rational(1, 2);
    let half_i = GaussRat::from_fracs(0, 1, -1, 2);
    for a in 0..n {
        let (z, zb) = (Poly::var(&base, Var::Z(a)), Poly::var(&base, Var::Zbar(a)));
        let x = &(&z + &zb).scale(&half) - &Poly::constant(&base, exact(o.z[a].re)?);
        let y = &(&z - &zb).scale(&half_i) - &Poly::constant(&base, exact(o.z[a].im)?);
        f = &f + &x.scale(&exact(r[2 * a])?);
        f = &f + &y.scale(&exact(r[2 * a + 1])?);
    }
    let t = &Poly::var(&base, Var::T) - &Poly::constant(&base, exact(o.t)?);
    f = &f + &t.scale(&exact(r[2 * n])?);
    let change = ConformalChange::new(f.clone(), s)?;
    let structure = transform_coframe(&change, s)?;
    let after = horizontal_data(map, &structure, o)?;
    Ok(Regauge { f, structure, c_after: after.c })
}

/// `x, φ(x), …, φ^k(x)`.
pub fn orbit(map: &RationalMap, x: &GroupPoint, k: usize) -> Result<Vec<GroupPoint>> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(x.clone());
    for _ in 0..k {
        let next = map.apply(out.last().expect("non-empty"))?;
        if !next.is_finite() {
            return Err(Error::Pole("orbit left the patch".into()));
        }
        out.push(next);
    }
    Ok(out)
}
