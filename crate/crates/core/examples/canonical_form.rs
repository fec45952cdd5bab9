//! Iterates the multiplier of a contraction to produce its canonical contact
//! form, and checks the convergence rate against the contraction factor.

use crlab::dynamics::{canonical_contact_form, stable_manifold_test, ContractionSpec};
use crlab::heisenberg::{make_model, symplectic_block, ExactPoint};
use crlab::sample::halton_box;
use crlab::scalar::{GaussRat, Poly, RatFunc, Var};
use num_rational::BigRational;

fn main() -> crlab::Result<()> {
    let m = make_model(2, symplectic_block(GaussRat::from_ints(1, 0)))?;
    let r = m.ring();
    let q = ExactPoint {
        z: vec![GaussRat::from_fracs(1, 2, 0, 1), GaussRat::from_ints(0, 0)],
        t: BigRational::new(1.into(), 3.into()),
    };
    let spec = ContractionSpec::composed(&m, &q, None, &BigRational::new(1.into(), 4.into()))?;
    println!("fixed point z = ({:.3}, {:.3}), t = {:.4}, μ = {}", spec.fixed.z[0], spec.fixed.z[1], spec.fixed.t, spec.mu);

    let zz = (0..2).fold(Poly::zero(r), |acc, a| &acc + &(&Poly::var(r, Var::Z(a)) * &Poly::var(r, Var::Zbar(a))));
    let theta = m.contact_form().scale(&RatFunc::from_poly(&Poly::one(r) + &zz));

    let pts = halton_box(2, 1.0, 1.0, 8, 1)?;
    for x in &pts[..2] {
        let st = stable_manifold_test(&spec, x, 200);
        println!("sample in stable region: {} after {} steps, η ≈ {:?}", st.stable, st.steps, st.eta);
    }
    let rep = canonical_contact_form(&spec, &theta, &pts, 1e-12, 200)?;
    println!("iterations {}, rate {:?}, pullback exact {}", rep.iterations, rep.rate, rep.pullback_exact);
    println!("canonical residual {:.2e}", rep.canonical_residual);
    for (x, u) in rep.samples.iter().zip(&rep.limit).take(4) {
        println!("  u({:.3}, {:.3}, t={:.3}) = {u:.12}", x.z[0], x.z[1], x.t);
    }
    Ok(())
}
