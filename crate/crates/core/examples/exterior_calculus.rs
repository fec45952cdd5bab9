//! Exact exterior calculus over rational functions in `(z, z̄, t)`.

use crlab::exterior::{Form, VectorField};
use crlab::scalar::{GaussRat, Poly, RatFunc, Ring, Var};

fn main() {
    let r = Ring::base(1);
    let z = Poly::var(&r, Var::Z(0));
    let zb = Poly::var(&r, Var::Zbar(0));
    let t = Poly::var(&r, Var::T);

    let u = RatFunc::new(&z * &zb, &Poly::one(&r) + &(&t * &t)).unwrap();
    println!("u = {u}");
    println!("∂u/∂t = {}", u.derive(Var::T));

    let du = Form::function(u.clone()).d();
    println!("du = {du:?}");
    println!("d(du) = {:?}", du.d());

    let alpha = Form::coordinate(&r, Var::Z(0)).scale(&RatFunc::from_poly(zb.clone()));
    let beta = Form::coordinate(&r, Var::T).scale(&u);
    let lhs = alpha.wedge(&beta).d();
    let rhs = alpha.d().wedge(&beta).sub(&alpha.wedge(&beta.d()));
    println!("d(α∧β) = dα∧β − α∧dβ: {}", lhs == rhs);

    let x = VectorField::coordinate(&r, Var::Z(0))
        .add(&VectorField::coordinate(&r, Var::T).scale(&RatFunc::from_poly(zb.scale(&GaussRat::from_ints(0, 1)))));
    let y = VectorField::coordinate(&r, Var::Zbar(0));
    println!("[X, Y] = {:?}", x.bracket(&y));
    println!("du(X) = {}", du.apply(&x));
    let lie = du.interior(&x).d();
    println!("L_X du = d(X ⌟ du) = {lie:?}");
}
