use crlab::crmaps::{cr_map_check, involution_check, map_structure_extract, sphere_inversion};
use crlab::exterior::RationalMap;
use crlab::heisenberg::{make_model, symplectic_block, ExactPoint, ModelSpec};
use crlab::sample::halton_box;
use crlab::scalar::{matrix, GaussRat, Poly, RatFunc, Var};
use crlab::Error;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hp() -> ModelSpec {
    make_model(2, symplectic_block(GaussRat::from_ints(1, 0))).unwrap()
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn random_generator(m: &ModelSpec, rng: &mut ChaCha8Rng) -> RationalMap {
    let n = m.dim();
    match rng.random_range(0..3) {
        0 => {
            let q = ExactPoint {
                z: (0..n).map(|_| GaussRat::from_fracs(rng.random_range(-3..=3), 2, rng.random_range(-3..=3), 3)).collect(),
                t: rat(rng.random_range(-5..=5), 4),
            };
            m.left_translation(&q)
        }
        1 => m.dilation(&rat(rng.random_range(1..=5), rng.random_range(1..=4))).unwrap(),
        _ => {
            let x = [
                GaussRat::rational(rng.random_range(-3..=3), 2),
                GaussRat::rational(rng.random_range(-3..=3), 3),
                GaussRat::rational(rng.random_range(-3..=3), 1),
            ];
            let u = matrix::su2_from_rational(x);
            let iso = m.isotropy(&u).unwrap();
            assert!(iso.valid);
            iso.map
        }
    }
}

#[test]
fn dilations_are_cr() {
    let m = hp();
    let pts = halton_box(2, 1.0, 1.0, 8, 1).unwrap();
    let d = m.dilation_exp(&rat(1, 3)).unwrap();
    let c = cr_map_check(&d, &m, &m, &pts).unwrap();
    assert!(c.is_cr && c.exact);
    let s = map_structure_extract(&d, &m, &m).unwrap();
    assert!(s.r_identity_exact && s.p_compatible_exact && s.hypothesis_holds);
    assert!((s.r_value().re - (2.0f64 / 3.0).exp()).abs() < 1e-12);
    assert!(s.c.is_zero());
}

#[test]
fn conjugation_is_not_cr() {
    let m = ModelSpec::heisenberg(1);
    let r = m.ring();
    let f = RationalMap::new(1, vec![RatFunc::var(r, Var::Zbar(0))], RatFunc::var(r, Var::T)).unwrap();
    let pts = halton_box(1, 1.0, 1.0, 8, 2).unwrap();
    let c = cr_map_check(&f, &m, &m, &pts).unwrap();
    assert!(!c.is_cr && !c.exact);
    assert!(matches!(map_structure_extract(&f, &m, &m), Err(Error::StructureViolation(_))));
}

#[test]
fn inversion_is_a_cr_involution() {
    for n in 1..=2 {
        let pts = halton_box(n, 1.5, 1.5, 10, 3).unwrap();
        let res = involution_check(n, &pts).unwrap();
        assert!(res.involutive);
        assert!(res.cr.is_cr && res.cr.exact);
        assert!(res.gauge_inversion_residual <= 1e-12);
        assert!(res.pass());
    }
    let iota = sphere_inversion(1).unwrap();
    assert!(iota.apply(&crlab::GroupPoint::origin(1)).is_err());
}

#[test]
fn isotropy_has_unit_stretch() {
    let m = hp();
    let u = matrix::su2_from_rational([GaussRat::rational(1, 2), GaussRat::rational(-1, 3), GaussRat::rational(2, 1)]);
    let iso = m.isotropy(&u).unwrap();
    let s = map_structure_extract(&iso.map, &m, &m).unwrap();
    assert!(s.r.is_one());
    assert!(s.r_identity_exact && s.p_compatible_exact);
}

#[test]
fn translation_structure() {
    let m = hp();
    let q = ExactPoint { z: vec![GaussRat::from_ints(1, 2), GaussRat::from_fracs(-1, 2, 1, 3)], t: rat(3, 5) };
    let s = map_structure_extract(&m.left_translation(&q), &m, &m).unwrap();
    assert!(s.r.is_one());
    // c(z) = 2 Im(q^α z̄^α) − 2 Re(P_{αβ} q^α z^β) + q_t
    let r = m.ring();
    let mut herm = Poly::zero(r);
    let mut quad = Poly::zero(r);
    for a in 0..2 {
        herm = &herm + &Poly::var(r, Var::Zbar(a)).scale(&q.z[a]);
        for b in 0..2 {
            quad = &quad + &Poly::var(r, Var::Z(b)).scale(&(&m.p()[a][b] * &q.z[a]));
        }
    }
    let two = GaussRat::from(2);
    let expect = &(&herm.im().scale(&two) - &quad.re().scale(&two)) + &Poly::constant(r, GaussRat::real(q.t.clone()));
    assert_eq!(s.c, RatFunc::from_poly(expect));
}

#[test]
fn generator_words_are_rigid() {
    let m = hp();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts = halton_box(2, 1.0, 1.0, 6, 4).unwrap();
    for _ in 0..12 {
        let g1 = random_generator(&m, &mut rng);
        let g2 = random_generator(&m, &mut rng);
        let g = g2.compose(&g1).unwrap();
        assert!(cr_map_check(&g, &m, &m, &pts).unwrap().exact);
        let s = map_structure_extract(&g, &m, &m).unwrap();
        assert!(s.r_identity_exact && s.p_compatible_exact);
        let r1 = map_structure_extract(&g1, &m, &m).unwrap().r_value();
        let r2 = map_structure_extract(&g2, &m, &m).unwrap().r_value();
        assert!((s.r_value() - r1 * r2).norm() <= 1e-10);
    }
}

#[test]
fn integrable_source_is_labelled() {
    let m = ModelSpec::heisenberg(2);
    let d = m.dilation(&rat(2, 1)).unwrap();
    let s = map_structure_extract(&d, &m, &m).unwrap();
    assert!(!s.hypothesis_holds);
    assert!(s.r_identity_exact);
}

#[test]
fn nonholomorphic_component_is_rejected() {
    let m = hp();
    let r = m.ring();
    let w = vec![
        RatFunc::from_poly(&Poly::var(r, Var::Z(0)) + &(&Poly::var(r, Var::Zbar(1)) * &Poly::var(r, Var::Z(0)))),
        RatFunc::var(r, Var::Z(1)),
    ];
    let f = RationalMap::new(2, w, RatFunc::var(r, Var::T)).unwrap();
    assert!(map_structure_extract(&f, &m, &m).is_err());
}
