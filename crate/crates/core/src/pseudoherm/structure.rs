use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exterior::{Form, VectorField};
use crate::linsolve::{self, Equation};
use crate::point::GroupPoint;
use crate::scalar::{common_ring, GaussRat, RatFunc, Ring, Var};

/// A frame direction: `Z_α`, `Z_ᾱ` or the characteristic field `T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Z(usize),
    Zb(usize),
    T,
}

impl Dir {
    pub fn conj(self) -> Dir {
        match self {
            Dir::Z(a) => Dir::Zb(a),
            Dir::Zb(a) => Dir::Z(a),
            Dir::T => Dir::T,
        }
    }

    /// `Z_1..Z_n, Z_1̄..Z_n̄, T`.
    pub fn all(n: usize) -> Vec<Dir> {
        let mut v: Vec<Dir> = (0..n).map(Dir::Z).collect();
        v.extend((0..n).map(Dir::Zb));
        v.push(Dir::T);
        v
    }
}

/// Contact form, admissible coframe, frame and the tensors `g`, `p` of the
/// decomposition `dθ = 2i g θ^α∧θ^β̄ + p θ^α∧θ^β + conj`.
#[derive(Clone, Debug)]
pub struct PHStructure {
    pub n: usize,
    pub theta: Form,
    pub coframe: Vec<Form>,
    pub frame: Vec<VectorField>,
    pub t_field: VectorField,
    pub g: Vec<Vec<RatFunc>>,
    pub g_inv: Vec<Vec<RatFunc>>,
    pub p: Vec<Vec<RatFunc>>,
}

fn form_matrix_row(a: &Form, n: usize, ring: &std::sync::Arc<Ring>) -> Vec<RatFunc> {
    (0..2 * n + 1).map(|k| a.coeff(&[k]).lift(ring)).collect()
}

/// Solves `θ(T) = 1`, `T ⌟ dθ = 0`.
pub fn characteristic_field(theta: &Form) -> Result<VectorField> {
    if theta.degree() != 1 {
        return Err(Error::Invalid("contact form must be a 1-form".into()));
    }
    let n = theta.dim();
    let ring = theta.ring().clone();
    let dth = theta.d();
    let mut eqs = Vec::new();
    let mut first = Equation::new(RatFunc::one(&ring));
    for k in 0..2 * n + 1 {
        first.add_term(k, theta.coeff(&[k]));
    }
    eqs.push(first);
    for k in 0..2 * n + 1 {
        let mut e = Equation::new(RatFunc::zero(&ring));
        for j in 0..2 * n + 1 {
            e.add_term(j, dth.coeff(&[j, k]));
        }
        eqs.push(e);
    }
    let sol = linsolve::solve(2 * n + 1, eqs).map_err(|e| match e {
        Error::Singular(m) | Error::Inconsistent(m) => Error::NonContact(m),
        other => other,
    })?;
    let t = VectorField::from_coeffs(sol);
    if !t.is_real() {
        return Err(Error::NonContact("characteristic field is not real".into()));
    }
    Ok(t)
}

/// Numeric contact condition `θ ∧ (dθ)ⁿ ≠ 0` at a point.
pub fn contact_volume(theta: &Form, point: &GroupPoint) -> Complex64 {
    let n = theta.dim();
    let dth = theta.d();
    let mut top = theta.clone();
    for _ in 0..n {
        top = top.wedge(&dth);
    }
    let idx: Vec<usize> = (0..2 * n + 1).collect();
    top.coeff(&idx).eval(point, &[])
}

impl PHStructure {
    /// Builds the structure for `θ` with coframe `θ^α`, checking admissibility
    /// and that `dθ` decomposes exactly with hermitian `g` and skew `p`.
    pub fn new(theta: Form, coframe: Vec<Form>) -> Result<Self> {
        let n = theta.dim();
        if coframe.len() != n || coframe.iter().any(|f| f.degree() != 1 || f.dim() != n) {
            return Err(Error::Dimension(format!("need {n} coframe 1-forms on the same patch")));
        }
        let mut rings: Vec<RatFunc> = vec![RatFunc::zero(theta.ring())];
        rings.extend(coframe.iter().map(|f| RatFunc::zero(f.ring())));
        let ring = common_ring(&rings);
        let theta = theta.lift(&ring);
        let coframe: Vec<Form> = coframe.iter().map(|f| f.lift(&ring)).collect();
        let t_field = characteristic_field(&theta)?;
        for (a, f) in coframe.iter().enumerate() {
            if !f.apply(&t_field).is_zero() {
                return Err(Error::NotAdmissible(format!("theta^{} (T) != 0", a + 1)));
            }
        }
        // dual frame of (θ, θ^α, θ^ᾱ)
        let mut rows = vec![form_matrix_row(&theta, n, &ring)];
        rows.extend(coframe.iter().map(|f| form_matrix_row(f, n, &ring)));
        rows.extend(coframe.iter().map(|f| form_matrix_row(&f.conj(), n, &ring)));
        let inv = linsolve::invert(&rows).map_err(|e| Error::NotAdmissible(format!("coframe is degenerate: {e}")))?;
        let frame: Vec<VectorField> =
            (0..n).map(|a| VectorField::from_coeffs((0..2 * n + 1).map(|k| inv[k][1 + a].clone()).collect())).collect();
        let mut s = PHStructure { n, theta, coframe, frame, t_field, g: Vec::new(), g_inv: Vec::new(), p: Vec::new() };
        s.extract_levi_and_p()?;
        Ok(s)
    }

    pub fn ring(&self) -> std::sync::Arc<Ring> {
        self.theta.ring().clone()
    }

    pub fn field(&self, d: Dir) -> VectorField {
        match d {
            Dir::Z(a) => self.frame[a].clone(),
            Dir::Zb(a) => self.frame[a].conj(),
            Dir::T => self.t_field.clone(),
        }
    }

    pub fn coframe_bar(&self) -> Vec<Form> {
        self.coframe.iter().map(Form::conj).collect()
    }

    /// `g_{αβ̄} = dθ(Z_α, Z_β̄)/(2i)`, `p_{αβ} = dθ(Z_α, Z_β)/2`, with the full
    /// decomposition certified exactly.
    fn extract_levi_and_p(&mut self) -> Result<()> {
        let n = self.n;
        let dth = self.theta.d();
        let zb: Vec<VectorField> = self.frame.iter().map(VectorField::conj).collect();
        let inv2i = GaussRat::from_fracs(0, 1, -1, 2);
        let half = GaussRat::rational(1, 2);
        let g: Vec<Vec<RatFunc>> =
            (0..n).map(|a| (0..n).map(|b| dth.eval(&[&self.frame[a], &zb[b]]).scale(&inv2i)).collect()).collect();
        let p: Vec<Vec<RatFunc>> =
            (0..n).map(|a| (0..n).map(|b| dth.eval(&[&self.frame[a], &self.frame[b]]).scale(&half)).collect()).collect();
        for a in 0..n {
            for b in 0..n {
                if g[a][b] != g[b][a].conj() {
                    return Err(Error::NotAdmissible("Levi form is not hermitian".into()));
                }
                if p[a][b] != -&p[b][a] {
                    return Err(Error::NotAdmissible("p is not skew".into()));
                }
            }
        }
        self.g = g;
        self.p = p;
        if !self.str1_residual().is_zero() {
            return Err(Error::NotAdmissible("dθ does not decompose in the coframe".into()));
        }
        // g^{αβ̄} with g^{αβ̄} g_{γβ̄} = δ^α_γ
        let inv = if n == 0 { Vec::new() } else { linsolve::invert(&self.g)? };
        self.g_inv = (0..n).map(|a| (0..n).map(|b| inv[b][a].clone()).collect()).collect();
        Ok(())
    }

    /// `dθ − (2i g θ^α∧θ^β̄ + p θ^α∧θ^β + p̄ θ^ᾱ∧θ^β̄)`.
    pub fn str1_residual(&self) -> Form {
        let n = self.n;
        let bar = self.coframe_bar();
        let two_i = GaussRat::from_ints(0, 2);
        let mut rhs = Form::zero(&self.ring(), 2);
        for a in 0..n {
            for b in 0..n {
                rhs = rhs.add(&self.coframe[a].wedge(&bar[b]).scale(&self.g[a][b].scale(&two_i)));
                rhs = rhs.add(&self.coframe[a].wedge(&self.coframe[b]).scale(&self.p[a][b]));
                rhs = rhs.add(&bar[a].wedge(&bar[b]).scale(&self.p[a][b].conj()));
            }
        }
        self.theta.d().sub(&rhs)
    }

    /// Admissibility residuals `θ^α(Z_β) − δ`, `θ^α(Z_β̄)`, `θ^α(T)`, `θ(Z_α)`, `θ(T) − 1`
    /// and `T ⌟ dθ`; all must vanish.
    pub fn admissibility_defects(&self) -> usize {
        let n = self.n;
        let mut bad = 0;
        let ring = self.ring();
        for a in 0..n {
            for b in 0..n {
                let expect = if a == b { RatFunc::one(&ring) } else { RatFunc::zero(&ring) };
                if self.coframe[a].apply(&self.frame[b]) != expect {
                    bad += 1;
                }
                if !self.coframe[a].apply(&self.frame[b].conj()).is_zero() {
                    bad += 1;
                }
            }
            if !self.coframe[a].apply(&self.t_field).is_zero() {
                bad += 1;
            }
            if !self.theta.apply(&self.frame[a]).is_zero() {
                bad += 1;
            }
        }
        if !self.theta.apply(&self.t_field).is_one() {
            bad += 1;
        }
        if !self.theta.d().interior(&self.t_field).is_zero() {
            bad += 1;
        }
        bad
    }

    /// Applies a frame direction to a function.
    pub fn derive(&self, d: Dir, f: &RatFunc) -> RatFunc {
        self.field(d).apply(f)
    }

    pub fn var_field(&self, v: Var) -> VectorField {
        VectorField::coordinate(&self.ring(), v)
    }
}
