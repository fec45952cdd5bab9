use crate::error::{Error, Result};
use crate::exterior::Form;
use crate::linsolve::{self, Equation};
use crate::scalar::RatFunc;

use super::structure::{Dir, PHStructure};
use super::tensor::{multi_indices, Slot, Tensor};

/// Coefficients of `ω_β^α = Γ_{γβ}^α θ^γ + Γ_{γ̄β}^α θ^γ̄ + Γ_{0β}^α θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub n: usize,
    /// `Γ_{γβ}^α` indexed `[γ, β, α]`.
    pub gamma: Tensor,
    /// `Γ_{γ̄β}^α` indexed `[γ, β, α]`.
    pub gamma_bar: Tensor,
    /// `Γ_{0β}^α` indexed `[β, α]`.
    pub gamma0: Tensor,
}

impl Connection {
    pub fn zero(s: &PHStructure) -> Self {
        let r = s.ring();
        let n = s.n;
        Connection {
            n,
            gamma: Tensor::zeros(&r, n, vec![Slot::Low, Slot::Low, Slot::Up]),
            gamma_bar: Tensor::zeros(&r, n, vec![Slot::LowBar, Slot::Low, Slot::Up]),
            gamma0: Tensor::zeros(&r, n, vec![Slot::Low, Slot::Up]),
        }
    }

    /// `ω_β^α(X)` on a frame direction.
    pub fn omega(&self, b: usize, a: usize, x: Dir) -> RatFunc {
        match x {
            Dir::Z(c) => self.gamma.get(&[c, b, a]).clone(),
            Dir::Zb(c) => self.gamma_bar.get(&[c, b, a]).clone(),
            Dir::T => self.gamma0.get(&[b, a]).clone(),
        }
    }

    /// `ω_β̄^ᾱ(X) = conj(ω_β^α(X̄))`.
    pub fn omega_bar(&self, b: usize, a: usize, x: Dir) -> RatFunc {
        self.omega(b, a, x.conj()).conj()
    }

    pub fn form(&self, s: &PHStructure, b: usize, a: usize) -> Form {
        let mut w = s.theta.scale(self.gamma0.get(&[b, a]));
        for c in 0..self.n {
            w = w.add(&s.coframe[c].scale(self.gamma.get(&[c, b, a])));
            w = w.add(&s.coframe[c].conj().scale(self.gamma_bar.get(&[c, b, a])));
        }
        w
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.is_zero() && self.gamma_bar.is_zero() && self.gamma0.is_zero()
    }
}

/// Connection, torsion, curvature and the covariant derivatives of `p`.
#[derive(Clone, Debug)]
pub struct TensorSet {
    pub connection: Connection,
    /// `T_β^α_γ` indexed `[β, α, γ]`.
    pub t: Tensor,
    /// `N_β̄^α_γ̄` indexed `[β, α, γ]`.
    pub nt: Tensor,
    /// `A^α_β̄` indexed `[α, β]`.
    pub a: Tensor,
    /// `B^α_β` indexed `[α, β]`.
    pub b: Tensor,
    /// `R_β^α_{γσ̄}` indexed `[β, α, γ, σ]`.
    pub r: Tensor,
    pub p: Tensor,
    /// `p_{αβ;γ}`.
    pub p_cov: Tensor,
    /// `p_{αβ;γ̄}`.
    pub p_cov_bar: Tensor,
    pub certificate: Certificate,
}

impl TensorSet {
    /// `(name, tensor)` for every reported tensor.
    pub fn named(&self) -> Vec<(&'static str, &Tensor)> {
        vec![
            ("T", &self.t),
            ("N", &self.nt),
            ("A", &self.a),
            ("B", &self.b),
            ("R", &self.r),
            ("p", &self.p),
            ("p;gamma", &self.p_cov),
            ("p;gammabar", &self.p_cov_bar),
        ]
    }
}

/// Exact residual checks of a solved structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub str1: bool,
    pub str2: bool,
    pub comp1: bool,
    pub comp2: bool,
    pub conjugate_consistent: bool,
}

impl Certificate {
    pub fn all(&self) -> bool {
        self.str1 && self.str2 && self.comp1 && self.comp2 && self.conjugate_consistent
    }
}

struct Layout {
    n: usize,
    u: usize,
}

impl Layout {
    fn new(n: usize) -> Self {
        Layout { n, u: 4 * n * n * n + 3 * n * n }
    }
    fn n3(&self) -> usize {
        self.n * self.n * self.n
    }
    fn gamma(&self, c: usize, b: usize, a: usize) -> usize {
        (c * self.n + b) * self.n + a
    }
    fn gamma_bar(&self, c: usize, b: usize, a: usize) -> usize {
        self.n3() + self.gamma(c, b, a)
    }
    fn gamma0(&self, b: usize, a: usize) -> usize {
        2 * self.n3() + b * self.n + a
    }
    fn t(&self, b: usize, a: usize, c: usize) -> usize {
        2 * self.n3() + self.n * self.n + (b * self.n + a) * self.n + c
    }
    fn nt(&self, b: usize, a: usize, c: usize) -> usize {
        3 * self.n3() + self.n * self.n + (b * self.n + a) * self.n + c
    }
    fn a(&self, a: usize, b: usize) -> usize {
        4 * self.n3() + self.n * self.n + a * self.n + b
    }
    fn b(&self, a: usize, b: usize) -> usize {
        4 * self.n3() + 2 * self.n * self.n + a * self.n + b
    }
    fn omega(&self, b: usize, a: usize, x: Dir) -> usize {
        match x {
            Dir::Z(c) => self.gamma(c, b, a),
            Dir::Zb(c) => self.gamma_bar(c, b, a),
            Dir::T => self.gamma0(b, a),
        }
    }
    fn conj(&self, j: usize) -> usize {
        if j < self.u {
            j + self.u
        } else {
            j - self.u
        }
    }
}

fn conj_equation(e: &Equation, l: &Layout) -> Equation {
    let mut out = Equation::new(e.rhs.conj());
    for (&j, c) in &e.coeffs {
        out.add_term(l.conj(j), c.conj());
    }
    out
}

fn push(eqs: &mut Vec<Equation>, e: Equation, l: &Layout) {
    let c = conj_equation(&e, l);
    eqs.push(e);
    eqs.push(c);
}

fn assemble(s: &PHStructure, l: &Layout) -> Vec<Equation> {
    let n = s.n;
    let ring = s.ring();
    let one = RatFunc::one(&ring);
    let m1 = -&one;
    let dirs = Dir::all(n);
    let fields: Vec<_> = dirs.iter().map(|&d| s.field(d)).collect();
    let mut eqs = Vec::new();
    for a in 0..n {
        let dth = s.coframe[a].d();
        for i in 0..dirs.len() {
            for j in i + 1..dirs.len() {
                let (x, y) = (dirs[i], dirs[j]);
                let mut e = Equation::new(dth.eval(&[&fields[i], &fields[j]]));
                // θ^β ∧ ω_β^α
                if let Dir::Z(b) = x {
                    e.add_term(l.omega(b, a, y), one.clone());
                }
                if let Dir::Z(b) = y {
                    e.add_term(l.omega(b, a, x), m1.clone());
                }
                match (x, y) {
                    (Dir::Z(b), Dir::Z(c)) => {
                        e.add_term(l.t(b, a, c), one.clone());
                        e.add_term(l.t(c, a, b), m1.clone());
                    }
                    (Dir::Zb(b), Dir::Zb(c)) => {
                        e.add_term(l.nt(b, a, c), one.clone());
                        e.add_term(l.nt(c, a, b), m1.clone());
                    }
                    (Dir::Zb(b), Dir::T) => e.add_term(l.a(a, b), m1.clone()),
                    (Dir::Z(b), Dir::T) => e.add_term(l.b(a, b), m1.clone()),
                    _ => {}
                }
                push(&mut eqs, e, l);
            }
        }
    }
    // dg_{αβ̄} = ω_α^γ g_{γβ̄} + ω_β̄^γ̄ g_{αγ̄}
    for &x in &dirs {
        for a in 0..n {
            for b in 0..n {
                let mut e = Equation::new(s.derive(x, &s.g[a][b]));
                for c in 0..n {
                    e.add_term(l.omega(a, c, x), s.g[c][b].clone());
                    e.add_term(l.conj(l.omega(b, c, x.conj())), s.g[a][c].clone());
                }
                push(&mut eqs, e, l);
            }
        }
    }
    let zero = RatFunc::zero(&ring);
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let mut e = Equation::new(zero.clone());
                e.add_term(l.t(b, a, c), one.clone());
                e.add_term(l.t(c, a, b), one.clone());
                push(&mut eqs, e, l);
                let mut e = Equation::new(zero.clone());
                e.add_term(l.nt(b, a, c), one.clone());
                e.add_term(l.nt(c, a, b), one.clone());
                push(&mut eqs, e, l);
            }
        }
    }
    // B_{αβ̄} = g_{γβ̄} B^γ_α hermitian
    for a in 0..n {
        for b in 0..n {
            let mut e = Equation::new(zero.clone());
            for c in 0..n {
                e.add_term(l.b(c, a), s.g[c][b].clone());
                e.add_term(l.conj(l.b(c, b)), -&s.g[c][a].conj());
            }
            push(&mut eqs, e, l);
        }
    }
    eqs
}

/// Solves for the unique pseudo-Hermitian connection and its torsions, then
/// derives curvature and `∇p`; every structure equation is certified exactly.
pub fn solve_connection(s: &PHStructure) -> Result<TensorSet> {
    let n = s.n;
    let l = Layout::new(n);
    let sol = linsolve::solve(2 * l.u, assemble(s, &l))?;
    let conjugate_consistent = (0..l.u).all(|j| sol[j + l.u] == sol[j].conj());
    let conn = Connection {
        n,
        gamma: Tensor::from_fn(n, vec![Slot::Low, Slot::Low, Slot::Up], |i| sol[l.gamma(i[0], i[1], i[2])].clone()),
        gamma_bar: Tensor::from_fn(n, vec![Slot::LowBar, Slot::Low, Slot::Up], |i| sol[l.gamma_bar(i[0], i[1], i[2])].clone()),
        gamma0: Tensor::from_fn(n, vec![Slot::Low, Slot::Up], |i| sol[l.gamma0(i[0], i[1])].clone()),
    };
    let t = Tensor::from_fn(n, vec![Slot::Low, Slot::Up, Slot::Low], |i| sol[l.t(i[0], i[1], i[2])].clone());
    let nt = Tensor::from_fn(n, vec![Slot::LowBar, Slot::Up, Slot::LowBar], |i| sol[l.nt(i[0], i[1], i[2])].clone());
    let a = Tensor::from_fn(n, vec![Slot::Up, Slot::LowBar], |i| sol[l.a(i[0], i[1])].clone());
    let b = Tensor::from_fn(n, vec![Slot::Up, Slot::Low], |i| sol[l.b(i[0], i[1])].clone());
    let p = Tensor::from_fn(n, vec![Slot::Low, Slot::Low], |i| s.p[i[0]][i[1]].clone());
    let certificate = Certificate {
        str1: s.str1_residual().is_zero(),
        str2: str2_residual(s, &conn, &t, &nt, &a, &b).iter().all(Form::is_zero),
        comp1: comp1_residual(s, &conn).iter().all(Form::is_zero),
        comp2: comp2_holds(s, &t, &nt, &b),
        conjugate_consistent,
    };
    if !certificate.all() {
        return Err(Error::StructureViolation(format!("connection residual check failed: {certificate:?}")));
    }
    let r = curvature(s, &conn);
    let p_cov = covariant_derivative(s, &conn, &p, false)?;
    let p_cov_bar = covariant_derivative(s, &conn, &p, true)?;
    Ok(TensorSet { connection: conn, t, nt, a, b, r, p, p_cov, p_cov_bar, certificate })
}

/// `dθ^α − (θ^β∧ω_β^α + T θ^β∧θ^γ + N θ^β̄∧θ^γ̄ + A θ∧θ^β̄ + B θ∧θ^β)` for each α.
pub fn str2_residual(s: &PHStructure, conn: &Connection, t: &Tensor, nt: &Tensor, a: &Tensor, b: &Tensor) -> Vec<Form> {
    let n = s.n;
    let bar = s.coframe_bar();
    (0..n)
        .map(|al| {
            let mut rhs = Form::zero(&s.ring(), 2);
            for be in 0..n {
                rhs = rhs.add(&s.coframe[be].wedge(&conn.form(s, be, al)));
                rhs = rhs.add(&s.theta.wedge(&bar[be]).scale(a.get(&[al, be])));
                rhs = rhs.add(&s.theta.wedge(&s.coframe[be]).scale(b.get(&[al, be])));
                for ga in 0..n {
                    rhs = rhs.add(&s.coframe[be].wedge(&s.coframe[ga]).scale(t.get(&[be, al, ga])));
                    rhs = rhs.add(&bar[be].wedge(&bar[ga]).scale(nt.get(&[be, al, ga])));
                }
            }
            s.coframe[al].d().sub(&rhs)
        })
        .collect()
}

/// `dg_{αβ̄} − ω_{αβ̄} − ω_{β̄α}` for each pair.
pub fn comp1_residual(s: &PHStructure, conn: &Connection) -> Vec<Form> {
    let n = s.n;
    let mut out = Vec::with_capacity(n * n);
    let forms: Vec<Vec<Form>> = (0..n).map(|b| (0..n).map(|a| conn.form(s, b, a)).collect()).collect();
    for a in 0..n {
        for b in 0..n {
            let mut r = Form::function(s.g[a][b].clone()).d();
            for c in 0..n {
                r = r.sub(&forms[a][c].scale(&s.g[c][b]));
                r = r.sub(&forms[b][c].conj().scale(&s.g[a][c]));
            }
            out.push(r);
        }
    }
    out
}

/// Skew symmetry of `T`, `N` and hermitian symmetry of `B_{αβ̄}`.
pub fn comp2_holds(s: &PHStructure, t: &Tensor, nt: &Tensor, b: &Tensor) -> bool {
    let n = s.n;
    for i in multi_indices(n, 3) {
        let (x, y, z) = (i[0], i[1], i[2]);
        if t.get(&[x, y, z]) != &-t.get(&[z, y, x]) || nt.get(&[x, y, z]) != &-nt.get(&[z, y, x]) {
            return false;
        }
    }
    let low = |a: usize, c: usize| -> RatFunc {
        let mut acc = RatFunc::zero(&s.ring());
        for g in 0..n {
            acc = &acc + &(&s.g[g][c] * b.get(&[g, a]));
        }
        acc
    };
    (0..n).all(|a| (0..n).all(|c| low(a, c) == low(c, a).conj()))
}

/// `R_β^α_{γσ̄} = 2Θ_β^α(Z_γ, Z_σ̄)` with `Θ = dω − ω∧ω`, the 2-form evaluated
/// with the averaging convention `(α∧β)(X,Y) = ½(α(X)β(Y) − α(Y)β(X))`; this is
/// the coefficient of `θ^γ∧θ^σ̄` in `Θ_β^α`.
pub fn curvature(s: &PHStructure, conn: &Connection) -> Tensor {
    let n = s.n;
    let ring = s.ring();
    let mut r = Tensor::zeros(&ring, n, vec![Slot::Low, Slot::Up, Slot::Low, Slot::LowBar]);
    if conn.is_zero() {
        return r;
    }
    let omega: Vec<Vec<Form>> = (0..n).map(|b| (0..n).map(|a| conn.form(s, b, a)).collect()).collect();
    let zb: Vec<_> = s.frame.iter().map(|z| z.conj()).collect();
    for b in 0..n {
        for a in 0..n {
            let mut th = omega[b][a].d();
            for c in 0..n {
                th = th.sub(&omega[b][c].wedge(&omega[c][a]));
            }
            if th.is_zero() {
                continue;
            }
            for g in 0..n {
                for sg in 0..n {
                    r.set(&[b, a, g, sg], th.eval(&[&s.frame[g], &zb[sg]]));
                }
            }
        }
    }
    r
}

/// `∇_X` of a frame tensor, same valence.
pub fn covariant_along(s: &PHStructure, conn: &Connection, t: &Tensor, x: Dir) -> Result<Tensor> {
    if t.rank() > 4 {
        return Err(Error::UnsupportedValence(format!("rank {} tensors are not supported", t.rank())));
    }
    let n = s.n;
    let field = s.field(x);
    let om: Vec<Vec<RatFunc>> = (0..n).map(|b| (0..n).map(|a| conn.omega(b, a, x)).collect()).collect();
    let omb: Vec<Vec<RatFunc>> = (0..n).map(|b| (0..n).map(|a| conn.omega_bar(b, a, x)).collect()).collect();
    let mut out = t.clone();
    for idx in multi_indices(n, t.rank()) {
        let mut v = field.apply(t.get(&idx));
        for (k, slot) in t.slots.iter().enumerate() {
            let i = idx[k];
            for sg in 0..n {
                let mut j = idx.clone();
                j[k] = sg;
                let c = t.get(&j);
                if c.is_zero() {
                    continue;
                }
                let w = match slot {
                    Slot::Low => -&om[i][sg],
                    Slot::LowBar => -&omb[i][sg],
                    Slot::Up => om[sg][i].clone(),
                    Slot::UpBar => omb[sg][i].clone(),
                };
                if !w.is_zero() {
                    v = &v + &(&w * c);
                }
            }
        }
        out.set(&idx, v);
    }
    Ok(out)
}

/// Covariant derivative with the new index appended: `t_{…;γ}` or, with
/// `bar`, `t_{…;γ̄}`.
pub fn covariant_derivative(s: &PHStructure, conn: &Connection, t: &Tensor, bar: bool) -> Result<Tensor> {
    let n = s.n;
    let mut slots = t.slots.clone();
    slots.push(if bar { Slot::LowBar } else { Slot::Low });
    let parts: Vec<Tensor> =
        (0..n).map(|g| covariant_along(s, conn, t, if bar { Dir::Zb(g) } else { Dir::Z(g) })).collect::<Result<_>>()?;
    Ok(Tensor::from_fn(n, slots, |i| {
        let (head, last) = i.split_at(i.len() - 1);
        parts[last[0]].get(head).clone()
    }))
}
