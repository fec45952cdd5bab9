use crlab::conformal::{
    cross_validate, discriminate_readings, solve_v, transform_coframe, transform_tensors, ConformalChange, Reading,
};
use crlab::heisenberg::{make_model, symplectic_block, ModelSpec};
use crlab::pseudoherm::{solve_connection, Dir, PHStructure};
use crlab::sample::halton_box;
use crlab::scalar::{GaussRat, Poly, RatFunc, Var};
use num_complex::Complex64;

fn structure(m: &ModelSpec) -> PHStructure {
    PHStructure::new(m.contact_form(), m.coframe()).unwrap()
}

fn hp() -> ModelSpec {
    make_model(2, symplectic_block(GaussRat::from_ints(1, 0))).unwrap()
}

fn z(m: &ModelSpec, a: usize) -> Poly {
    Poly::var(m.ring(), Var::Z(a))
}

fn zb(m: &ModelSpec, a: usize) -> Poly {
    Poly::var(m.ring(), Var::Zbar(a))
}

fn t(m: &ModelSpec) -> Poly {
    Poly::var(m.ring(), Var::T)
}

#[test]
fn zero_exponent_is_the_identity() {
    let m = hp();
    let s = structure(&m);
    let c = ConformalChange::new(Poly::zero(m.ring()), &s).unwrap();
    assert!(c.v.iter().all(RatFunc::is_zero));
    let out = transform_coframe(&c, &s).unwrap();
    assert_eq!(out.theta, s.theta);
    assert_eq!(out.coframe, s.coframe);
    let cv = cross_validate(Poly::zero(m.ring()), &s, Reading::default(), &halton_box(2, 1.0, 1.0, 8, 1).unwrap(), 1e-9).unwrap();
    assert!(cv.pass);
    assert!(cv.tensors.iter().all(|d| d.exact_match && d.max_deviation == 0.0));
}

#[test]
fn constant_exponent_scales_exactly() {
    let m = hp();
    let s = structure(&m);
    let f = Poly::constant(m.ring(), GaussRat::rational(1, 2));
    let pts = halton_box(2, 1.0, 1.0, 8, 2).unwrap();
    // every reading agrees because all correction terms vanish
    for cv in discriminate_readings(f.clone(), &s, &pts, 1e-9).unwrap() {
        assert!(cv.tensors.iter().all(|d| d.exact_match), "{}", cv.reading.describe());
    }
    let c = ConformalChange::new(f, &s).unwrap();
    assert!(c.v.iter().all(RatFunc::is_zero));
    assert!(c.f0.is_zero());
    let ts = solve_connection(&s).unwrap();
    let pred = transform_tensors(&c, &s, &ts, Reading::default()).unwrap();
    // vanishing is preserved
    for ((name, a), (_, b)) in pred.named().into_iter().zip(ts.named()) {
        assert_eq!(a.is_zero(), b.is_zero(), "{name}");
    }
}

#[test]
fn time_exponent_is_admissible() {
    let m = ModelSpec::heisenberg(1);
    let s = structure(&m);
    let c = ConformalChange::new(t(&m), &s).unwrap();
    assert_eq!(c.ring.n_gens(), 1);
    // p = 0, g = 1: v = i f_z̄ = i(−iz) = z
    assert_eq!(c.v[0], RatFunc::var(&c.ring, Var::Z(0)));
    let out = transform_coframe(&c, &s).unwrap();
    assert_eq!(out.admissibility_defects(), 0);
    assert_eq!(out.theta, s.theta.lift(&c.ring).scale(&(&c.e * &c.e)));
    assert!(out.str1_residual().is_zero());
}

#[test]
fn v_solves_the_defining_equation() {
    let m = ModelSpec::heisenberg(2);
    let s = structure(&m);
    let f = &(&z(&m, 0) * &zb(&m, 1)) + &(&(&z(&m, 1) * &zb(&m, 0)) + &t(&m));
    let c = ConformalChange::new(f, &s).unwrap();
    for a in 0..2 {
        let expect = c.f_bar[a].scale(&GaussRat::i());
        assert_eq!(c.v[a], expect);
    }
    let m = hp();
    let s = structure(&m);
    let re_z1 = (&z(&m, 0) + &zb(&m, 0)).scale(&GaussRat::rational(1, 2));
    let c = ConformalChange::new(re_z1, &s).unwrap();
    assert!(c.v_residual(&s).iter().all(RatFunc::is_zero));
    let x = halton_box(2, 1.0, 1.0, 5, 3).unwrap();
    for p in &x {
        for r in c.v_residual(&s) {
            assert!(r.eval(p, &[]).norm() <= 1e-12);
        }
    }
    assert_eq!(solve_v(&c.f_alpha, &s).unwrap(), c.v);
}

#[test]
fn complex_exponent_is_rejected() {
    let m = ModelSpec::heisenberg(1);
    let s = structure(&m);
    assert!(ConformalChange::new(z(&m, 0), &s).is_err());
}

#[test]
fn levi_form_and_p_are_invariant() {
    let m = hp();
    let s = structure(&m);
    let f = &(&z(&m, 0) * &zb(&m, 0)).scale(&GaussRat::rational(1, 3)) + &t(&m).scale(&GaussRat::rational(-1, 2));
    let c = ConformalChange::new(f, &s).unwrap();
    let out = transform_coframe(&c, &s).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            assert_eq!(out.g[a][b], s.g[a][b].lift(&out.ring()));
            assert_eq!(out.p[a][b], s.p[a][b].lift(&out.ring()));
        }
    }
    assert_eq!(out.admissibility_defects(), 0);
}

#[test]
fn formulas_match_direct_recomputation() {
    let pts1 = halton_box(1, 1.0, 1.0, 6, 4).unwrap();
    let h1 = ModelSpec::heisenberg(1);
    let s = structure(&h1);
    for f in [&z(&h1, 0) + &zb(&h1, 0), &(&z(&h1, 0) * &zb(&h1, 0)) + &t(&h1), t(&h1)] {
        let cv = cross_validate(f, &s, Reading::default(), &pts1, 1e-9).unwrap();
        assert!(cv.pass, "{:?}", cv.tensors);
        // exact rational identities, not merely numeric
        assert!(cv.tensors.iter().all(|d| d.exact_match), "{:?}", cv.tensors);
    }
    let m = hp();
    let s = structure(&m);
    let pts2 = halton_box(2, 1.0, 1.0, 6, 5).unwrap();
    let f = &(&z(&m, 1) * &zb(&m, 1)) + &(&z(&m, 0) + &zb(&m, 0));
    let cv = cross_validate(f, &s, Reading::default(), &pts2, 1e-9).unwrap();
    assert!(cv.pass, "{:?}", cv.tensors);
}

#[test]
fn displayed_index_readings_fail() {
    let h1 = ModelSpec::heisenberg(1);
    let s = structure(&h1);
    let pts = halton_box(1, 1.0, 1.0, 6, 6).unwrap();
    let passing: Vec<Reading> = discriminate_readings(&z(&h1, 0) * &zb(&h1, 0), &s, &pts, 1e-9)
        .unwrap()
        .into_iter()
        .filter(|c| c.pass)
        .map(|c| c.reading)
        .collect();
    assert!(passing.contains(&Reading::default()));
    assert!(passing.iter().all(|r| r.a_index == Reading::default().a_index && r.r_sym == Reading::default().r_sym));
}

#[test]
fn base_with_torsion_pins_the_reading() {
    // a second change on top of a non-flat structure exercises every term
    let m = hp();
    let s0 = structure(&m);
    let c1 = ConformalChange::new(&(&z(&m, 0) * &zb(&m, 0)) + &t(&m), &s0).unwrap();
    let s1 = transform_coframe(&c1, &s0).unwrap();
    let pts = halton_box(2, 0.8, 0.8, 4, 7).unwrap();
    let results = discriminate_readings(&z(&m, 0) + &zb(&m, 0), &s1, &pts, 1e-9).unwrap();
    let passing: Vec<Reading> = results.iter().filter(|c| c.pass).map(|c| c.reading).collect();
    assert_eq!(passing, vec![Reading::default()]);
}

#[test]
fn composition_of_changes() {
    let m = ModelSpec::heisenberg(1);
    let s0 = structure(&m);
    let f1 = &(&z(&m, 0) * &zb(&m, 0)) + &t(&m);
    let f2 = &z(&m, 0) + &zb(&m, 0);
    let c1 = ConformalChange::new(f1.clone(), &s0).unwrap();
    let s1 = transform_coframe(&c1, &s0).unwrap();
    let c2 = ConformalChange::new(f2.clone(), &s1).unwrap();
    let s12 = transform_coframe(&c2, &s1).unwrap();
    let c = ConformalChange::new(&f1 + &f2, &s0).unwrap();
    let s = transform_coframe(&c, &s0).unwrap();
    let a = solve_connection(&s12).unwrap();
    let b = solve_connection(&s).unwrap();
    let pts = halton_box(1, 1.0, 1.0, 10, 8).unwrap();
    for x in &pts {
        let th_a = s12.theta.eval_at(x, &[vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]]);
        let th_b = s.theta.eval_at(x, &[vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]]);
        assert!((th_a - th_b).norm() <= 1e-9 * th_b.norm().max(1.0));
        for ((name, ta), (_, tb)) in a.named().into_iter().zip(b.named()) {
            let dev = ta.eval(x).max_deviation(&tb.eval(x));
            assert!(dev <= 1e-9, "{name}: {dev:e}");
        }
        let ta = s12.derive(Dir::T, &RatFunc::var(&s12.ring(), Var::T)).eval(x, &[]);
        let tb = s.derive(Dir::T, &RatFunc::var(&s.ring(), Var::T)).eval(x, &[]);
        assert!((ta - tb).norm() <= 1e-9);
    }
}
