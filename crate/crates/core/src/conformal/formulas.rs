use crate::error::Result;
use crate::pseudoherm::{covariant_derivative, PHStructure, Slot, Tensor, TensorSet};
use crate::scalar::{GaussRat, RatFunc};

use super::ConformalChange;

/// Meaning of `f₀` in the `B̃` formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum F0Reading {
    /// `f₀ = Tf`.
    CharacteristicDerivative,
    Zero,
}

/// Meaning of `v_{βμ̄}` in the curvature formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VMixedReading {
    /// `v_{β;μ̄}`.
    LowThenBar,
    /// `conj(v_{μ;β̄})`, i.e. `v_{μ̄;β}` with the indices read in the other order.
    BarThenLow,
}

/// Meaning of `p_γ̄^α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PRaiseReading {
    /// `g^{αρ̄} p_{γ̄ρ̄}`.
    RaiseSecond,
    /// `g^{αρ̄} p_{ρ̄γ̄}`.
    RaiseFirst,
}

/// Meaning of `T_{γ̄β}^α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixedTorsionReading {
    Zero,
    /// `g^{ασ̄} g_{βρ̄} conj(T_γ^ρ_σ)`.
    ConjTorsion,
    /// The same with the opposite sign.
    NegConjTorsion,
}

/// Index reading of `v_{γ̄;β}` inside the `Ã` formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AIndexReading {
    /// `v_{γ̄;β}` as displayed.
    AsDisplayed,
    /// `v_{γ̄;β̄}`, matching the free index of `Ã^α_β̄`.
    Barred,
}

/// Sign of `v_{β;γ̄}` inside the symmetrised term of the curvature formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RSymReading {
    AsDisplayed,
    Antisymmetric,
}

/// One interpretation of the symbols left undefined in the change formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reading {
    pub f0: F0Reading,
    pub v_mixed: VMixedReading,
    pub p_raise: PRaiseReading,
    pub mixed_torsion: MixedTorsionReading,
    pub a_index: AIndexReading,
    pub r_sym: RSymReading,
}

impl Default for Reading {
    fn default() -> Self {
        Reading {
            f0: F0Reading::CharacteristicDerivative,
            v_mixed: VMixedReading::LowThenBar,
            p_raise: PRaiseReading::RaiseSecond,
            mixed_torsion: MixedTorsionReading::ConjTorsion,
            a_index: AIndexReading::Barred,
            r_sym: RSymReading::Antisymmetric,
        }
    }
}

impl Reading {
    pub fn all() -> Vec<Reading> {
        let mut out = Vec::new();
        for f0 in [F0Reading::CharacteristicDerivative, F0Reading::Zero] {
            for v_mixed in [VMixedReading::LowThenBar, VMixedReading::BarThenLow] {
                for p_raise in [PRaiseReading::RaiseSecond, PRaiseReading::RaiseFirst] {
                    for mixed_torsion in
                        [MixedTorsionReading::Zero, MixedTorsionReading::ConjTorsion, MixedTorsionReading::NegConjTorsion]
                    {
                        for a_index in [AIndexReading::AsDisplayed, AIndexReading::Barred] {
                            for r_sym in [RSymReading::AsDisplayed, RSymReading::Antisymmetric] {
                                out.push(Reading { f0, v_mixed, p_raise, mixed_torsion, a_index, r_sym });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        format!(
            "f0={:?} v_mixed={:?} p_raise={:?} mixed_torsion={:?} a_index={:?} r_sym={:?}",
            self.f0, self.v_mixed, self.p_raise, self.mixed_torsion, self.a_index, self.r_sym
        )
    }
}

/// Transformed tensors as predicted by the change formulas.
#[derive(Clone, Debug)]
pub struct Predicted {
    pub t: Tensor,
    pub nt: Tensor,
    pub a: Tensor,
    pub b: Tensor,
    pub r: Tensor,
    pub p: Tensor,
    pub p_cov: Tensor,
    pub p_cov_bar: Tensor,
}

impl Predicted {
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

fn delta(r: &RatFunc, a: usize, b: usize) -> RatFunc {
    if a == b {
        RatFunc::one(r.ring())
    } else {
        RatFunc::zero(r.ring())
    }
}

/// Applies the transformation formulas for `T̃, Ñ, Ã, B̃, R̃, p̃_{αβ;γ}, p̃_{αβ;γ̄}`.
pub fn transform_tensors(c: &ConformalChange, s: &PHStructure, ts: &TensorSet, rd: Reading) -> Result<Predicted> {
    let n = s.n;
    let ring = c.ring.clone();
    let zero = RatFunc::zero(&ring);
    let one = RatFunc::one(&ring);
    let i = GaussRat::i();
    let ei = c.e.inv()?;
    let ei2 = &ei * &ei;
    let conn = &ts.connection;
    let v = &c.v;
    let vb = c.v_bar();
    let vl = c.v_lower(s);
    let vlb: Vec<RatFunc> = vl.iter().map(RatFunc::conj).collect();
    let g = |a: usize, b: usize| s.g[a][b].clone();
    let gi = |a: usize, b: usize| s.g_inv[a][b].clone();
    let p = |a: usize, b: usize| s.p[a][b].clone();
    let pb = |a: usize, b: usize| s.p[a][b].conj();
    let sum = |f: &dyn Fn(usize) -> RatFunc| (0..n).fold(zero.clone(), |acc, k| &acc + &f(k));

    // covariant derivatives on the original structure
    let vlb_t = Tensor::from_fn(n, vec![Slot::LowBar], |k| vlb[k[0]].clone());
    let vl_t = Tensor::from_fn(n, vec![Slot::Low], |k| vl[k[0]].clone());
    let vup_t = Tensor::from_fn(n, vec![Slot::Up], |k| v[k[0]].clone());
    let fl_t = Tensor::from_fn(n, vec![Slot::Low], |k| c.f_alpha[k[0]].clone());
    let fb_t = Tensor::from_fn(n, vec![Slot::LowBar], |k| c.f_bar[k[0]].clone());
    let vbar_semi = covariant_derivative(s, conn, &vlb_t, false)?; // v_{γ̄;β}
    let vbar_semi_bar = covariant_derivative(s, conn, &vlb_t, true)?; // v_{γ̄;β̄}
    let v_semi_bar = covariant_derivative(s, conn, &vl_t, true)?; // v_{β;γ̄}
    let vup_semi = covariant_derivative(s, conn, &vup_t, false)?; // v^α_{;λ}
    let f_l_mb = covariant_derivative(s, conn, &fl_t, true)?; // f_{λ;μ̄}
    let f_mb_l = covariant_derivative(s, conn, &fb_t, false)?; // f_{μ̄;λ}

    let f0 = match rd.f0 {
        F0Reading::CharacteristicDerivative => c.f0.clone(),
        F0Reading::Zero => zero.clone(),
    };
    let v_mixed = |b: usize, m: usize| match rd.v_mixed {
        VMixedReading::LowThenBar => v_semi_bar.get(&[b, m]).clone(),
        VMixedReading::BarThenLow => vbar_semi.get(&[m, b]).clone(),
    };
    // p_γ̄^α
    let p_up = |gm: usize, a: usize| {
        sum(&|r| match rd.p_raise {
            PRaiseReading::RaiseSecond => &gi(a, r) * &pb(gm, r),
            PRaiseReading::RaiseFirst => &gi(a, r) * &pb(r, gm),
        })
    };
    // T_{γ̄β}^α
    let t_mixed = |gm: usize, b: usize, a: usize| -> RatFunc {
        let base = || {
            let mut acc = zero.clone();
            for sg in 0..n {
                for r in 0..n {
                    let t = ts.t.get(&[gm, r, sg]);
                    if !t.is_zero() {
                        acc = &acc + &(&(&gi(a, sg) * &g(b, r)) * &t.conj());
                    }
                }
            }
            acc
        };
        match rd.mixed_torsion {
            MixedTorsionReading::Zero => zero.clone(),
            MixedTorsionReading::ConjTorsion => base(),
            MixedTorsionReading::NegConjTorsion => -&base(),
        }
    };
    // the symmetrised g^{αγ̄}v_{γ̄;β} + v_{β;γ̄}g^{αγ̄}
    let sym_v = |a: usize, b: usize| sum(&|k| &gi(a, k) * &(vbar_semi.get(&[k, b]) + v_semi_bar.get(&[b, k])));
    let vv = sum(&|k| &v[k] * &vl[k]);

    let t = Tensor::from_fn(n, vec![Slot::Low, Slot::Up, Slot::Low], |x| {
        let (b, a, gm) = (x[0], x[1], x[2]);
        let mut r = ts.t.get(x) + &(&v[a] * &p(b, gm));
        r = &r - &(&sum(&|k| &p(gm, k) * &v[k]) * &delta(&one, a, b));
        r = &r + &(&sum(&|k| &p(b, k) * &v[k]) * &delta(&one, a, gm));
        &ei * &r
    });
    let nt = Tensor::from_fn(n, vec![Slot::LowBar, Slot::Up, Slot::LowBar], |x| {
        let (b, a, gm) = (x[0], x[1], x[2]);
        &ei * &(ts.nt.get(x) + &(&v[a] * &pb(b, gm)))
    });
    let two = GaussRat::from(2);
    let two_i = GaussRat::from_ints(0, 2);
    let a_t = Tensor::from_fn(n, vec![Slot::Up, Slot::LowBar], |x| {
        let (a, b) = (x[0], x[1]);
        let vsemi = |k: usize| match rd.a_index {
            AIndexReading::AsDisplayed => vbar_semi.get(&[k, b]).clone(),
            AIndexReading::Barred => vbar_semi_bar.get(&[k, b]).clone(),
        };
        let mut r = ts.a.get(x) - &sum(&|k| &gi(a, k) * &vsemi(k));
        r = &r - &(&v[a] * &vlb[b]).scale(&two_i);
        r = &r - &sum(&|k| &vb[k] * ts.nt.get(&[k, a, b])).scale(&two);
        r = &r - &(&v[a] * &sum(&|k| &vb[k] * &pb(k, b))).scale(&two);
        &ei2 * &r
    });
    let half = GaussRat::rational(1, 2);
    let b_t = Tensor::from_fn(n, vec![Slot::Up, Slot::Low], |x| {
        let (a, b) = (x[0], x[1]);
        let mut r = ts.b.get(x) - &sym_v(a, b).scale(&half);
        r = &r + &(&delta(&one, a, b) * &f0);
        r = &r - &(&v[a] * &sum(&|k| &v[k] * &p(k, b)));
        r = &r - &(&vl[b] * &sum(&|k| &vb[k] * &p_up(k, a)));
        r = &r - &sum(&|k| &v[k] * ts.t.get(&[k, a, b]));
        r = &r - &sum(&|k| &vb[k] * &t_mixed(k, b, a));
        &ei2 * &r
    });
    let r_t = Tensor::from_fn(n, vec![Slot::Low, Slot::Up, Slot::Low, Slot::LowBar], |x| {
        let (b, a, l, m) = (x[0], x[1], x[2], x[3]);
        let dab = delta(&one, a, b);
        let dal = delta(&one, a, l);
        let glm = g(l, m);
        let mut r = ts.r.get(x) - &(&dab * &(f_l_mb.get(&[l, m]) + f_mb_l.get(&[m, l])));
        r = &r + &(&g(b, m) * vup_semi.get(&[a, l])).scale(&two_i);
        r = &r - &(&v_mixed(b, m) * &dal).scale(&two_i);
        let sym = match rd.r_sym {
            RSymReading::AsDisplayed => sym_v(a, b),
            RSymReading::Antisymmetric => sum(&|k| &gi(a, k) * &(vbar_semi.get(&[k, b]) - v_semi_bar.get(&[b, k]))),
        };
        r = &r + &(&sym * &glm).scale(&i);
        r = &r - &(&(&dab * &glm) * &vv).scale(&GaussRat::from(4));
        r = &r - &(&(&g(b, m) * &dal) * &vv).scale(&GaussRat::from(4));
        let inner = {
            let mut q = &sum(&|k| &p(b, k) * &v[k]) * &v[a];
            q = &q + &(&vl[b] * &sum(&|k| &vb[k] * &p_up(k, a)));
            q = &q - &sum(&|k| &v[k] * ts.t.get(&[k, a, b]));
            q = &q + &sum(&|k| &vb[k] * &t_mixed(k, b, a));
            q
        };
        r = &r - &(&inner * &glm).scale(&two_i);
        &ei2 * &r
    });
    let p_t = ts.p.clone();
    let p_cov = Tensor::from_fn(n, vec![Slot::Low, Slot::Low, Slot::Low], |x| {
        let (a, b, gm) = (x[0], x[1], x[2]);
        let mut r = ts.p_cov.get(x) - &(&p(a, b) * &c.f_alpha[gm]).scale(&two);
        r = &r - &(&p(a, gm) * &vl[b]).scale(&two_i);
        r = &r - &(&p(gm, b) * &vl[a]).scale(&two_i);
        &ei * &r
    });
    let p_cov_bar = Tensor::from_fn(n, vec![Slot::Low, Slot::Low, Slot::LowBar], |x| {
        let (a, b, gm) = (x[0], x[1], x[2]);
        let mut r = ts.p_cov_bar.get(x) + &(&p(a, b) * &c.f_bar[gm]).scale(&two);
        r = &r - &(&sum(&|k| &p(a, k) * &v[k]) * &g(b, gm)).scale(&two_i);
        r = &r - &(&sum(&|k| &p(k, b) * &v[k]) * &g(a, gm)).scale(&two_i);
        &ei * &r
    });
    Ok(Predicted { t, nt, a: a_t, b: b_t, r: r_t, p: p_t, p_cov, p_cov_bar })
}
