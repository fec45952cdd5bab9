#![allow(clippy::needless_range_loop)]

use crlab::exterior::{Form, RationalMap, VectorField};
use crlab::heisenberg::{classify_congruence, make_model, symplectic_block, ExactPoint, ModelSpec};
use crlab::scalar::matrix;
use crlab::scalar::{GaussRat, Poly, RatFunc, Var};
use crlab::{Error, GroupPoint};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(a: i64, b: i64) -> GaussRat {
    GaussRat::from_ints(a, b)
}

fn random_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    GaussRat::from_fracs(rng.random_range(-5..=5), rng.random_range(1..=4), rng.random_range(-5..=5), rng.random_range(1..=4))
}

fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<GaussRat>> {
    let mut p = matrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let c = random_gauss(rng);
            p[j][i] = -&c;
            p[i][j] = c;
        }
    }
    p
}

fn random_exact_point(rng: &mut ChaCha8Rng, n: usize) -> ExactPoint {
    ExactPoint {
        z: (0..n).map(|_| random_gauss(rng)).collect(),
        t: BigRational::new(rng.random_range(-9..=9).into(), rng.random_range(1..=5).into()),
    }
}

#[test]
fn model_validation() {
    assert!(make_model(1, vec![vec![q(0, 0)]]).is_ok());
    let p = symplectic_block(q(1, 0));
    let m = make_model(2, p).unwrap();
    assert!(!m.is_integrable());
    let sym = vec![vec![q(0, 0), q(1, 0)], vec![q(1, 0), q(0, 0)]];
    assert!(matches!(make_model(2, sym), Err(Error::NotSkew(_))));
}

#[test]
fn group_law_examples() {
    let m = make_model(2, symplectic_block(q(1, 0))).unwrap();
    let a = GroupPoint::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 0.0);
    let b = GroupPoint::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], 0.0);
    let c = m.mul(&a, &b);
    assert_eq!(c.z, vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    assert_eq!(c.t, -2.0);
    let h = ModelSpec::heisenberg(1);
    let a = GroupPoint::new(vec![Complex64::new(1.0, 0.0)], 0.0);
    let b = GroupPoint::new(vec![Complex64::new(0.0, 1.0)], 0.0);
    let c = h.mul(&a, &b);
    assert_eq!(c.z[0], Complex64::new(1.0, 1.0));
    assert_eq!(c.t, -2.0);
    let o = GroupPoint::origin(1);
    assert_eq!(h.mul(&o, &b), b);
}

#[test]
fn group_axioms_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=3 {
        let m = make_model(n, random_skew(&mut rng, n)).unwrap();
        for _ in 0..50 / 3 + 1 {
            let a = random_exact_point(&mut rng, n);
            let b = random_exact_point(&mut rng, n);
            let c = random_exact_point(&mut rng, n);
            let l = m.mul_exact(&m.mul_exact(&a, &b), &c);
            let r = m.mul_exact(&a, &m.mul_exact(&b, &c));
            assert_eq!(l, r);
            assert_eq!(m.mul_exact(&a, &m.inverse_exact(&a)), ExactPoint::origin(n));
            assert_eq!(m.mul_exact(&ExactPoint::origin(n), &a), a);
        }
    }
}

#[test]
fn brackets_reproduce_the_model_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        let m = make_model(n, random_skew(&mut rng, n)).unwrap();
        let r = m.ring();
        let z = m.frame();
        let dt = VectorField::coordinate(r, Var::T);
        for a in 0..n {
            for b in 0..n {
                let zz = z[a].bracket(&z[b]);
                assert_eq!(zz, dt.scale(&RatFunc::constant(r, &m.p()[a][b] * &GaussRat::from(-2))));
                let zbar = z[a].bracket(&z[b].conj());
                let expect = if a == b { dt.scale(&RatFunc::constant(r, q(0, -2))) } else { VectorField::zero(r) };
                assert_eq!(zbar, expect);
            }
        }
    }
}

#[test]
fn contact_form_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m0 = ModelSpec::heisenberg(1);
    let th = m0.contact_form();
    let r = m0.ring();
    // n = 1, P = 0: dθ = 2i dz∧dz̄
    assert_eq!(th.d(), Form::monomial(r, &[0, 1], RatFunc::constant(r, q(0, 2))));
    for n in 1..=3 {
        let m = make_model(n, random_skew(&mut rng, n)).unwrap();
        let th = m.contact_form();
        assert!(th.is_real());
        let dt = VectorField::coordinate(m.ring(), Var::T);
        assert!(th.apply(&dt).is_one());
        for zf in m.frame() {
            assert!(th.apply(&zf).is_zero());
            assert!(th.apply(&zf.conj()).is_zero());
        }
        assert!(th.d().d().is_zero());
        assert!(th.d().interior(&dt).is_zero());
    }
    // n = 2, P₁₂ = 1
    let m = make_model(2, symplectic_block(q(1, 0))).unwrap();
    let r = m.ring();
    let mut expect = Form::zero(r, 2);
    expect = expect.add(&Form::monomial(r, &[0, 2], RatFunc::constant(r, q(0, 2))));
    expect = expect.add(&Form::monomial(r, &[1, 3], RatFunc::constant(r, q(0, 2))));
    expect = expect.add(&Form::monomial(r, &[0, 1], RatFunc::constant(r, q(2, 0))));
    expect = expect.add(&Form::monomial(r, &[2, 3], RatFunc::constant(r, q(2, 0))));
    assert_eq!(m.contact_form().d(), expect);
}

#[test]
fn pullbacks_of_the_contact_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let m = make_model(2, random_skew(&mut rng, 2)).unwrap();
    let th = m.contact_form();
    for _ in 0..5 {
        let qp = random_exact_point(&mut rng, 2);
        let l = m.left_translation(&qp);
        assert_eq!(l.pullback(&th).unwrap(), th);
        for z in m.frame() {
            assert_eq!(l.pushforward(&z), l.along(&z).unwrap());
        }
    }
    let lam = m.dilation(&BigRational::new(1.into(), 2.into())).unwrap();
    assert_eq!(lam.pullback(&th).unwrap(), th.scale_const(&GaussRat::rational(1, 4)));
    let tau = m.dilation_exp(&BigRational::new(1.into(), 3.into())).unwrap();
    let pulled = tau.pullback(&th).unwrap();
    let e2 = RatFunc::from_poly(Poly::generator(&tau.ring(), 0).pow(2));
    assert_eq!(pulled, th.scale(&e2));
    assert_eq!(RationalMap::identity(m.ring()).pullback(&th).unwrap(), th);
    let lam2 = lam.compose(&lam).unwrap();
    assert_eq!(lam2, m.dilation(&BigRational::new(1.into(), 4.into())).unwrap());
    for z in m.frame() {
        let expect = lam.along(&z).unwrap().scale(&RatFunc::constant(m.ring(), GaussRat::rational(1, 2)));
        assert_eq!(lam.pushforward(&z), expect);
    }
}

#[test]
fn isotropy_examples() {
    let m = make_model(2, symplectic_block(q(1, 0))).unwrap();
    let id = matrix::identity(2);
    assert!(m.isotropy(&id).unwrap().valid);
    let phi = 0.7f64;
    let e = Complex64::from_polar(1.0, phi);
    let u = DMatrix::from_row_slice(2, 2, &[e, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), e.conj()]);
    assert!(m.isotropy_numeric(&u).unwrap().valid);
    let i = Complex64::new(0.0, 1.0);
    let u = DMatrix::from_row_slice(2, 2, &[i, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), i]);
    let iso = m.isotropy_numeric(&u).unwrap();
    assert!(!iso.valid);
    let bad = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
    assert!(matches!(m.isotropy_numeric(&bad), Err(Error::NotUnitary(_))));
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    a.qr().q()
}

fn random_numeric_skew(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    &a - a.transpose()
}

#[test]
fn congruence_classification() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = random_numeric_skew(&mut rng, 4);
    let same = classify_congruence(&p, &p).unwrap();
    assert!(same.equivalent && same.residual <= 1e-8);
    let zero = DMatrix::zeros(4, 4);
    assert!(!classify_congruence(&zero, &p).unwrap().equivalent);
    for n in 2..=6 {
        let p = random_numeric_skew(&mut rng, n);
        let v = random_unitary(&mut rng, n);
        let pp = v.transpose() * &p * &v;
        let c = classify_congruence(&p, &pp).unwrap();
        assert!(c.equivalent, "n={n} gap={}", c.max_gap);
        let u = c.witness.unwrap();
        assert!((&p - u.transpose() * &pp * &u).norm() <= 1e-8);
    }
}
