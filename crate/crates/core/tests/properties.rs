mod common;

use crlab::scalar::{Poly, RatFunc, Ring, Var};
use crlab::GroupPoint;
use num_complex::Complex64;
use proptest::prelude::*;

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9 * (1.0 + a.norm().max(b.norm()))
}

fn point(x: [f64; 5]) -> GroupPoint {
    GroupPoint::new(vec![Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])], x[4])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let ring = Ring::base(2);
        let (a, b, c) = (common::ratfunc(&mut r, &ring), common::ratfunc(&mut r, &ring), common::ratfunc(&mut r, &ring));
        prop_assert!(&(&a + &b) + &c == &a + &(&b + &c));
        prop_assert!(&(&a * &b) * &c == &a * &(&b * &c));
        prop_assert!(&a * &(&b + &c) == &(&a * &b) + &(&a * &c));
        prop_assert!(&a * &b == &b * &a);
        prop_assert!((&a - &a).is_zero());
        if !b.is_zero() {
            prop_assert!(&a.checked_div(&b).unwrap() * &b == a);
        }
    }

    #[test]
    fn partial_derivatives_commute_and_follow_leibniz(seed in any::<u64>(), i in 0usize..5, j in 0usize..5) {
        let mut r = common::rng(seed);
        let ring = Ring::base(2);
        let (u, v) = (Var::from_index(i, 2), Var::from_index(j, 2));
        let (f, g) = (common::ratfunc(&mut r, &ring), common::ratfunc(&mut r, &ring));
        prop_assert!(f.derive(u).derive(v) == f.derive(v).derive(u));
        prop_assert!((&f * &g).derive(u) == &(&f.derive(u) * &g) + &(&f * &g.derive(u)));
    }

    #[test]
    fn conjugation_swaps_holomorphic_derivatives(seed in any::<u64>(), a in 0usize..2) {
        let mut r = common::rng(seed);
        let ring = Ring::base(2);
        let f = common::ratfunc(&mut r, &ring);
        prop_assert!(f.derive(Var::Z(a)).conj() == f.conj().derive(Var::Zbar(a)));
        prop_assert!(f.derive(Var::T).conj() == f.conj().derive(Var::T));
        prop_assert!(f.conj().conj() == f);
    }

    #[test]
    fn evaluation_is_a_homomorphism(seed in any::<u64>(), x in proptest::array::uniform5(-1.0f64..1.0)) {
        let mut r = common::rng(seed);
        let ring = Ring::base(2);
        let (f, g) = (common::ratfunc(&mut r, &ring), common::ratfunc(&mut r, &ring));
        let p = point(x);
        let (fx, gx) = (f.eval(&p, &[]), g.eval(&p, &[]));
        prop_assert!(close((&f + &g).eval(&p, &[]), fx + gx));
        prop_assert!(close((&f * &g).eval(&p, &[]), fx * gx));
        prop_assert!(close(f.conj().eval(&p, &[]), fx.conj()));
    }

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), k in 0usize..3) {
        let mut r = common::rng(seed);
        let ring = Ring::base(2);
        let a = common::form(&mut r, &ring, k);
        prop_assert!(a.d().d().is_zero());
    }

    #[test]
    fn d_is_an_antiderivation(seed in any::<u64>(), p in 0usize..3, q in 0usize..2) {
        let mut r = common::rng(seed);
        let ring = Ring::base(1);
        let a = common::form(&mut r, &ring, p);
        let b = common::form(&mut r, &ring, q);
        let lhs = a.wedge(&b).d();
        let second = a.wedge(&b.d());
        let rhs = a.d().wedge(&b).add(&if p % 2 == 0 { second } else { second.neg() });
        prop_assert!(lhs == rhs);
    }

    #[test]
    fn cartan_formula(seed in any::<u64>(), k in 0usize..3) {
        let mut r = common::rng(seed);
        let ring = Ring::base(1);
        let beta = common::form(&mut r, &ring, k);
        let x = common::field(&mut r, &ring);
        prop_assert!(common::cartan_holds(&beta, &x));
    }

    #[test]
    fn jacobi_identity(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let ring = Ring::base(2);
        let (x, y, z) = (common::field(&mut r, &ring), common::field(&mut r, &ring), common::field(&mut r, &ring));
        let sum = x.bracket(&y.bracket(&z)).add(&y.bracket(&z.bracket(&x))).add(&z.bracket(&x.bracket(&y)));
        prop_assert!(sum.is_zero());
        prop_assert!(x.bracket(&y).add(&y.bracket(&x)).is_zero());
    }

    #[test]
    fn pullback_commutes_with_d_and_wedge(seed in any::<u64>(), k in 0usize..2) {
        let mut r = common::rng(seed);
        let ring = Ring::base(1);
        let f = common::poly_map(&mut r, &ring);
        let a = common::polynomial_form(&mut r, &ring, k);
        let b = common::polynomial_form(&mut r, &ring, 1);
        prop_assert!(f.pullback(&a.d()).unwrap() == f.pullback(&a).unwrap().d());
        prop_assert!(f.pullback(&a.wedge(&b)).unwrap() == f.pullback(&a).unwrap().wedge(&f.pullback(&b).unwrap()));
    }

    #[test]
    fn canonical_json_round_trips(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let ring = Ring::base(2);
        let p: Poly = common::poly(&mut r, &ring, 5, 3);
        let text = crlab::json::to_canonical_string(&crlab::json::poly_value(&p));
        let back = crlab::json::parse_poly(&text, 2).unwrap();
        prop_assert!(back == p);
        prop_assert_eq!(crlab::json::to_canonical_string(&crlab::json::poly_value(&back)), text);
        let f: RatFunc = common::ratfunc(&mut r, &ring);
        let text = crlab::json::to_canonical_string(&crlab::json::ratfunc_value(&f));
        let back = crlab::json::parse_ratfunc(&text, 2).unwrap();
        prop_assert!(back == f);
        prop_assert_eq!(crlab::json::to_canonical_string(&crlab::json::ratfunc_value(&back)), text);
    }
}
