//! CR maps between Heisenberg models and the rigidity of their components.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::RationalMap;
use crate::heisenberg::ModelSpec;
use crate::point::GroupPoint;
use crate::scalar::{GaussRat, Poly, RatFunc, Var};

/// Outcome of [`cr_map_check`].
#[derive(Clone, Debug)]
pub struct CrCheck {
    pub is_cr: bool,
    /// Both residual families vanish as exact fractions.
    pub exact: bool,
    /// Max over samples of the `Z'_μ̄` coefficients of `dF(Z_α)`.
    pub antiholomorphic_residual: f64,
    /// Max over samples of `Z_α s − (Z_α w^λ) K'_λ∘F`.
    pub transverse_residual: f64,
    pub samples_used: usize,
}

impl CrCheck {
    pub fn max_residual(&self) -> f64 {
        self.antiholomorphic_residual.max(self.transverse_residual)
    }
}

fn kprime_along(map: &RationalMap, dst: &ModelSpec) -> Result<Vec<RatFunc>> {
    (0..dst.dim()).map(|l| map.compose_ratfunc(&RatFunc::from_poly(dst.k_alpha(l)))).collect()
}

/// Residuals of `dF(Z_α) ∈ span{Z'_λ}`: for each `α` the coefficients
/// `Z_α w̄^μ` and `Z_α s − (Z_α w^λ)K'_λ∘F`.
pub fn cr_residuals(map: &RationalMap, src: &ModelSpec, dst: &ModelSpec) -> Result<(Vec<RatFunc>, Vec<RatFunc>)> {
    if map.n_src() != src.dim() || map.n_dst() != dst.dim() {
        return Err(Error::Dimension("map does not match the source and target models".into()));
    }
    let frame = src.frame();
    let kp = kprime_along(map, dst)?;
    let w = map.w();
    let mut anti = Vec::new();
    let mut trans = Vec::new();
    for z in &frame {
        for wm in w {
            anti.push(z.apply(&wm.conj()));
        }
        let mut r = z.apply(map.s());
        for (wl, k) in w.iter().zip(&kp) {
            r = &r - &(&z.apply(wl) * k);
        }
        trans.push(r);
    }
    Ok((anti, trans))
}

fn sup_at(fs: &[RatFunc], samples: &[GroupPoint]) -> (f64, usize) {
    let mut used = 0;
    let mut sup: f64 = 0.0;
    for x in samples {
        let vals: Option<Vec<Complex64>> = fs.iter().map(|f| f.eval_checked(x, &[]).ok()).collect();
        if let Some(v) = vals {
            used += 1;
            sup = v.iter().map(|c| c.norm()).fold(sup, f64::max);
        }
    }
    (sup, used)
}

fn jacobian_det(map: &RationalMap, x: &GroupPoint) -> f64 {
    let j = map.real_jacobian(x);
    let m = j.len();
    let mat = nalgebra::DMatrix::from_fn(m, m, |a, b| j[a][b]);
    mat.determinant()
}

/// Tests `dF(Z_α) ∈ span{Z'_λ}`, exactly when possible and otherwise to
/// `1e-10` at the samples where `F` is defined.
pub fn cr_map_check(map: &RationalMap, src: &ModelSpec, dst: &ModelSpec, samples: &[GroupPoint]) -> Result<CrCheck> {
    let (anti, trans) = cr_residuals(map, src, dst)?;
    let defined: Vec<&GroupPoint> = samples.iter().filter(|x| map.apply(x).is_ok()).collect();
    if !samples.is_empty() {
        let dets: Vec<f64> = defined.iter().map(|x| jacobian_det(map, x)).filter(|d| d.is_finite()).collect();
        if dets.iter().all(|d| d.abs() <= 1e-14) {
            return Err(Error::Degenerate("Jacobian is degenerate at every sample".into()));
        }
    }
    let exact = anti.iter().chain(&trans).all(RatFunc::is_zero);
    let (a, used) = sup_at(&anti, samples);
    let (t, _) = sup_at(&trans, samples);
    let is_cr = exact || (used > 0 && a <= 1e-10 && t <= 1e-10);
    Ok(CrCheck { is_cr, exact, antiholomorphic_residual: a, transverse_residual: t, samples_used: used })
}

/// `(w, r, c)` of a model CR map `s = r t + c(z)`.
#[derive(Clone, Debug)]
pub struct CRMapStructure {
    pub w: Vec<RatFunc>,
    pub r: RatFunc,
    pub c: RatFunc,
    /// `r = (1/n) Σ |∂w^β/∂z^α|²` holds as an identity of fractions.
    pub r_identity_exact: bool,
    pub r_identity_residual: f64,
    /// `r P_{αβ} = P'_{λμ} ∂_α w^λ ∂_β w^μ` for every `P_{αβ} ≠ 0`.
    pub p_compatible_exact: bool,
    pub p_compatible_residual: f64,
    /// False when `P = 0`: the rigidity statements are then not guaranteed.
    pub hypothesis_holds: bool,
}

impl CRMapStructure {
    pub fn r_value(&self) -> Complex64 {
        self.r.eval(&GroupPoint::origin(self.r.dim()), &[])
    }

    pub fn r_identity_holds(&self, tol: f64) -> bool {
        self.r_identity_exact || self.r_identity_residual <= tol
    }

    pub fn p_compatible(&self, tol: f64) -> bool {
        self.p_compatible_exact || self.p_compatible_residual <= tol
    }
}

fn is_constant(f: &RatFunc) -> bool {
    Var::all(f.dim()).into_iter().all(|v| f.derive(v).is_zero())
}

fn default_samples(n: usize) -> Vec<GroupPoint> {
    (0..6)
        .map(|k| {
            let a = 0.17 + 0.11 * k as f64;
            GroupPoint::new(
                (0..n).map(|j| Complex64::new(a - 0.13 * j as f64, 0.29 - 0.07 * (k + j) as f64)).collect(),
                0.31 * k as f64 - 0.6,
            )
        })
        .collect()
}

/// Extracts and verifies the rigid form of a CR map between models.
pub fn map_structure_extract(map: &RationalMap, src: &ModelSpec, dst: &ModelSpec) -> Result<CRMapStructure> {
    let n = src.dim();
    if map.n_src() != n || dst.dim() != n {
        return Err(Error::Dimension("models must have the same dimension".into()));
    }
    for (l, w) in map.w().iter().enumerate() {
        if !w.derive(Var::T).is_zero() {
            return Err(Error::StructureViolation(format!("w^{} depends on t", l + 1)));
        }
        for a in 0..n {
            if !w.derive(Var::Zbar(a)).is_zero() {
                return Err(Error::StructureViolation(format!("w^{} depends on conj(z^{})", l + 1, a + 1)));
            }
        }
    }
    let r = map.s().derive(Var::T);
    if !is_constant(&r) {
        return Err(Error::StructureViolation("ds/dt is not constant".into()));
    }
    if !r.is_real() {
        return Err(Error::StructureViolation("ds/dt is not real".into()));
    }
    let t = RatFunc::var(r.ring(), Var::T);
    let c = map.s() - &(&r * &t);
    if !c.derive(Var::T).is_zero() {
        return Err(Error::StructureViolation("s - r t depends on t".into()));
    }
    let dw: Vec<Vec<RatFunc>> = (0..n).map(|a| map.w().iter().map(|w| w.derive(Var::Z(a))).collect()).collect();
    let mut sum = RatFunc::zero(r.ring());
    for row in &dw {
        for d in row {
            sum = &sum + &(d * &d.conj());
        }
    }
    let r_gap = &r - &sum.scale(&GaussRat::rational(1, n.max(1) as i64));
    let mut p_gaps = Vec::new();
    let (p, pp) = (src.p(), dst.p());
    for a in 0..n {
        for b in 0..n {
            if p[a][b].is_zero() {
                continue;
            }
            let mut rhs = RatFunc::zero(r.ring());
            for l in 0..n {
                for m in 0..n {
                    if !pp[l][m].is_zero() {
                        rhs = &rhs + &(&dw[a][l] * &dw[b][m]).scale(&pp[l][m]);
                    }
                }
            }
            p_gaps.push(&r.scale(&p[a][b]) - &rhs);
        }
    }
    let pts = default_samples(n);
    let r_identity_exact = r_gap.is_zero();
    let p_compatible_exact = p_gaps.iter().all(RatFunc::is_zero);
    let r_identity_residual = if r_identity_exact { 0.0 } else { sup_at(&[r_gap], &pts).0 };
    let p_compatible_residual = if p_compatible_exact { 0.0 } else { sup_at(&p_gaps, &pts).0 };
    Ok(CRMapStructure {
        w: map.w().to_vec(),
        r,
        c,
        r_identity_exact,
        r_identity_residual,
        p_compatible_exact,
        p_compatible_residual,
        hypothesis_holds: !src.is_integrable() && !dst.is_integrable(),
    })
}

/// The inversion `ι(z, t) = (z/(−|z|² + it), −t/(|z|⁴ + t²))` of `𝓗₀ ∖ {0}`.
pub fn sphere_inversion(n: usize) -> Result<RationalMap> {
    let m = ModelSpec::heisenberg(n);
    let r = m.ring();
    let mut zz = Poly::zero(r);
    for a in 0..n {
        zz = &zz + &(&Poly::var(r, Var::Z(a)) * &Poly::var(r, Var::Zbar(a)));
    }
    let t = Poly::var(r, Var::T);
    let den = &zz.neg_ref() + &t.scale(&GaussRat::i());
    let w = (0..n).map(|a| RatFunc::new(Poly::var(r, Var::Z(a)), den.clone())).collect::<Result<Vec<_>>>()?;
    let s = RatFunc::new(t.neg_ref(), &zz.pow(2) + &t.pow(2))?;
    RationalMap::new(n, w, s)
}

/// Outcome of [`involution_check`].
#[derive(Clone, Debug)]
pub struct InvolutionCheck {
    pub involutive: bool,
    pub cr: CrCheck,
    /// Max over samples of `|gauge(ι(x))·gauge(x) − 1|`.
    pub gauge_inversion_residual: f64,
}

impl InvolutionCheck {
    pub fn pass(&self) -> bool {
        self.involutive && self.cr.is_cr && self.gauge_inversion_residual <= 1e-12
    }
}

/// Verifies `ι∘ι = id` exactly, that `ι` is CR, and `gauge(ι(x)) = 1/gauge(x)`.
pub fn involution_check(n: usize, samples: &[GroupPoint]) -> Result<InvolutionCheck> {
    let iota = sphere_inversion(n)?;
    let m = ModelSpec::heisenberg(n);
    let twice = iota.compose(&iota)?;
    let involutive = twice == RationalMap::identity(m.ring());
    let cr = cr_map_check(&iota, &m, &m, samples)?;
    let mut gauge_inversion_residual: f64 = 0.0;
    for x in samples {
        if let Ok(y) = iota.apply(x) {
            gauge_inversion_residual = gauge_inversion_residual.max((y.gauge() * x.gauge() - 1.0).abs());
        }
    }
    Ok(InvolutionCheck { involutive, cr, gauge_inversion_residual })
}
