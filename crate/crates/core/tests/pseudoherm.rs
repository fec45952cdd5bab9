#![allow(clippy::needless_range_loop)]

use crlab::exterior::Form;
use crlab::heisenberg::{make_model, symplectic_block, ModelSpec};
use crlab::pseudoherm::{
    characteristic_field, covariant_derivative, flatness_test, solve_connection, str2_residual, Connection, PHStructure, Slot,
    Tensor,
};
use crlab::scalar::{matrix, GaussRat, Poly, RatFunc, Ring, Var};
use crlab::GroupPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(a: i64, b: i64) -> GaussRat {
    GaussRat::from_ints(a, b)
}

fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<GaussRat>> {
    let mut p = matrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let c = GaussRat::from_fracs(rng.random_range(-4..=4), rng.random_range(1..=3), rng.random_range(-4..=4), 1);
            p[j][i] = -&c;
            p[i][j] = c;
        }
    }
    p
}

fn model_structure(m: &ModelSpec) -> PHStructure {
    PHStructure::new(m.contact_form(), m.coframe()).unwrap()
}

#[test]
fn model_tensors_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in 1..=3 {
        let m = make_model(n, random_skew(&mut rng, n)).unwrap();
        let s = model_structure(&m);
        assert_eq!(s.admissibility_defects(), 0);
        let ring = m.ring();
        assert_eq!(s.t_field, crlab::exterior::VectorField::coordinate(ring, Var::T));
        for a in 0..n {
            for b in 0..n {
                let d = if a == b { RatFunc::one(ring) } else { RatFunc::zero(ring) };
                assert_eq!(s.g[a][b], d);
                assert_eq!(s.p[a][b], RatFunc::constant(ring, m.p()[a][b].clone()));
            }
        }
        let (rep, ts) = flatness_test(&s).unwrap();
        assert!(ts.certificate.all());
        assert!(ts.connection.is_zero());
        assert!(rep.flat, "{:?}", rep.nonvanishing);
        assert_eq!(rep.p.as_ref(), Some(m.p()));
        assert!(ts.p_cov_bar.is_zero());
    }
}

#[test]
fn characteristic_field_of_a_rescaled_form() {
    let m = ModelSpec::heisenberg(1);
    let f = Poly::var(m.ring(), Var::T);
    let ring = Ring::with_generators(1, vec![f]).unwrap();
    let e2 = RatFunc::from_poly(Poly::generator(&ring, 0).pow(2));
    let theta = m.contact_form().lift(&ring).scale(&e2);
    let t = characteristic_field(&theta).unwrap();
    assert!(theta.apply(&t).is_one());
    assert!(theta.d().interior(&t).is_zero());
    // n = 0: θ = dt
    let r0 = Ring::base(0);
    let t0 = characteristic_field(&Form::coordinate(&r0, Var::T)).unwrap();
    assert!(t0.coeff(Var::T).is_one());
}

#[test]
fn swapped_coframe_permutes_the_levi_form() {
    let m = make_model(2, symplectic_block(q(2, 1))).unwrap();
    let mut cf = m.coframe();
    cf.swap(0, 1);
    let s = PHStructure::new(m.contact_form(), cf).unwrap();
    let r = m.ring();
    assert_eq!(s.p[0][1], RatFunc::constant(r, q(-2, -1)));
    assert!(s.g[0][1].is_zero() && s.g[0][0].is_one());
}

#[test]
fn rescaled_frame_stays_flat() {
    let m = make_model(2, symplectic_block(q(1, 0))).unwrap();
    let mut cf = m.coframe();
    cf[0] = cf[0].scale_const(&GaussRat::rational(1, 2));
    let s = PHStructure::new(m.contact_form(), cf).unwrap();
    let (rep, _) = flatness_test(&s).unwrap();
    assert!(rep.flat);
    let p = rep.p.unwrap();
    assert_eq!(p[0][1], q(2, 0));
    assert_eq!(s.g[0][0], RatFunc::constant(m.ring(), q(4, 0)));
}

fn conformal_structure(m: &ModelSpec, f: Poly) -> PHStructure {
    // θ̃ = e^{2f}θ with coframe e^f(θ^α + v^α θ); v from f_α = i v_α + p v
    let ring = Ring::with_generators(m.dim(), vec![f.clone()]).unwrap();
    let e = RatFunc::from_poly(Poly::generator(&ring, 0));
    let theta = m.contact_form().lift(&ring);
    let n = m.dim();
    let zs = m.frame();
    let fr = RatFunc::from_poly(f.lift(&ring));
    // solve for v with p = P, g = δ
    let fa: Vec<RatFunc> = zs.iter().map(|z| z.apply(&fr)).collect();
    let mut eqs = Vec::new();
    for a in 0..n {
        let mut en = crlab::linsolve::Equation::new(fa[a].clone());
        en.add_term(n + a, RatFunc::constant(&ring, GaussRat::i()));
        for b in 0..n {
            en.add_term(b, RatFunc::constant(&ring, m.p()[a][b].clone()));
        }
        let mut ec = crlab::linsolve::Equation::new(fa[a].conj());
        ec.add_term(a, RatFunc::constant(&ring, -GaussRat::i()));
        for b in 0..n {
            ec.add_term(n + b, RatFunc::constant(&ring, m.p()[a][b].conj()));
        }
        eqs.push(en);
        eqs.push(ec);
    }
    let v = crlab::linsolve::solve(2 * n, eqs).unwrap();
    let cf: Vec<Form> = m.coframe().iter().enumerate().map(|(a, c)| c.lift(&ring).add(&theta.scale(&v[a])).scale(&e)).collect();
    PHStructure::new(theta.scale(&(&e * &e)), cf).unwrap()
}

#[test]
fn conformal_change_is_certified() {
    let m = make_model(2, symplectic_block(q(1, 0))).unwrap();
    let r = m.ring();
    let f =
        &Poly::var(r, Var::Z(0)).scale(&GaussRat::rational(1, 2)) + &Poly::var(r, Var::Zbar(0)).scale(&GaussRat::rational(1, 2));
    let s = conformal_structure(&m, f);
    assert_eq!(s.admissibility_defects(), 0);
    for a in 0..2 {
        for b in 0..2 {
            assert_eq!(s.p[a][b], RatFunc::constant(&s.ring(), m.p()[a][b].clone()));
        }
    }
    let ts = solve_connection(&s).unwrap();
    assert!(ts.certificate.all());
    assert!(!ts.connection.is_zero());
    // uniqueness: perturbing a Γ coefficient breaks the structure equation
    let mut bad: Connection = ts.connection.clone();
    let k = [0, 1, 0];
    let old = bad.gamma.get(&k).clone();
    bad.gamma.set(&k, &old + &RatFunc::one(&s.ring()));
    let res = str2_residual(&s, &bad, &ts.t, &ts.nt, &ts.a, &ts.b);
    assert!(res.iter().any(|f| !f.is_zero()));
}

#[test]
fn constant_conformal_factor_keeps_model_flat() {
    let m = make_model(2, symplectic_block(q(0, 1))).unwrap();
    let f = Poly::constant(m.ring(), GaussRat::rational(1, 2));
    let s = conformal_structure(&m, f);
    let (rep, _) = flatness_test(&s).unwrap();
    assert!(rep.flat);
}

#[test]
fn nonconstant_factor_is_not_flat() {
    let m = ModelSpec::heisenberg(1);
    let f = Poly::var(m.ring(), Var::T);
    let s = conformal_structure(&m, f);
    let (rep, _) = flatness_test(&s).unwrap();
    assert!(!rep.flat);
    let m = make_model(2, symplectic_block(q(1, 0))).unwrap();
    let s = conformal_structure(&m, Poly::var(m.ring(), Var::T));
    let (rep, _) = flatness_test(&s).unwrap();
    assert!(rep.nonvanishing.contains(&"B".to_string()), "{:?}", rep.nonvanishing);
}

#[test]
fn covariant_derivative_of_a_covector() {
    // v_α = z̄^α on 𝓗₀: v_{ᾱ;β} = Z_β z^α = δ
    let m = ModelSpec::heisenberg(2);
    let s = model_structure(&m);
    let ts = solve_connection(&s).unwrap();
    let r = m.ring();
    let v = Tensor::from_fn(2, vec![Slot::Low], |i| RatFunc::var(r, Var::Zbar(i[0])));
    let dv = covariant_derivative(&s, &ts.connection, &v.conj(), false).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert_eq!(dv.get(&[a, b]).is_one(), a == b);
            assert_eq!(dv.get(&[a, b]).is_zero(), a != b);
        }
    }
    assert!(matches!(
        covariant_derivative(&s, &ts.connection, &Tensor::zeros(r, 2, vec![Slot::Low; 5]), false),
        Err(crlab::Error::UnsupportedValence(_))
    ));
}

#[test]
fn tensor_norm_examples() {
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    let r = Ring::base(2);
    let mut t = Tensor::zeros(&r, 2, vec![Slot::Low, Slot::Up, Slot::Low]);
    let x = GroupPoint::origin(2);
    let id = DMatrix::<Complex64>::identity(2, 2);
    assert_eq!(t.eval(&x).norm(&id).unwrap(), 0.0);
    t.set(&[0, 0, 1], RatFunc::constant(&r, q(3, 4)));
    assert!((t.eval(&x).norm_sqr(&id).unwrap() - 25.0).abs() < 1e-12);
    // unitary frame rotation
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tn = Tensor::from_fn(2, vec![Slot::Low, Slot::Up, Slot::Low], |_| {
        RatFunc::constant(&r, GaussRat::from_fracs(rng.random_range(-5..5), 3, rng.random_range(-5..5), 2))
    })
    .eval(&x);
    let u = DMatrix::from_fn(2, 2, |i, j| Complex64::new((i + 2 * j) as f64 + 0.5, i as f64 - j as f64)).qr().q();
    // T'_{b}^{a}_{c} = U^β_b (U⁻¹)^a_α U^γ_c T_β^α_γ
    let ui = u.adjoint();
    let mut rot = tn.clone();
    for b in 0..2 {
        for a in 0..2 {
            for c in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for be in 0..2 {
                    for al in 0..2 {
                        for ga in 0..2 {
                            acc += u[(be, b)] * ui[(a, al)] * u[(ga, c)] * tn.data[be * 4 + al * 2 + ga];
                        }
                    }
                }
                rot.data[b * 4 + a * 2 + c] = acc;
            }
        }
    }
    let n0 = tn.norm(&id).unwrap();
    assert!((rot.norm(&id).unwrap() - n0).abs() < 1e-10);
    let bad = DMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
    );
    assert!(tn.norm(&bad).is_err());
}
