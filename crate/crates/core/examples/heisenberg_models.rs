//! Builds a generalized Heisenberg group from a skew matrix, verifies the
//! group law and structure on random points, and composes a few automorphisms.

use crlab::heisenberg::{make_model, symplectic_block, ExactPoint};
use crlab::scalar::GaussRat;
use num_rational::BigRational;

fn main() -> crlab::Result<()> {
    let m = make_model(2, symplectic_block(GaussRat::from_ints(1, 0)))?;
    println!("n = {}, integrable: {}", m.dim(), m.is_integrable());
    println!("θ = {:?}", m.contact_form());

    let check = m.verify(32, 7);
    println!("group axioms {}  brackets {}  contact form {}", check.group_axioms, check.brackets, check.contact_form);

    let a = ExactPoint {
        z: vec![GaussRat::from_fracs(1, 2, 0, 1), GaussRat::from_fracs(0, 1, 1, 3)],
        t: BigRational::new(1.into(), 5.into()),
    };
    let b = ExactPoint {
        z: vec![GaussRat::from_fracs(-1, 1, 1, 1), GaussRat::from_fracs(2, 3, 0, 1)],
        t: BigRational::from_integer(2.into()),
    };
    let ab = m.mul_exact(&a, &b);
    println!("a·b = z {:?} t {}", ab.z.iter().map(|c| c.to_string()).collect::<Vec<_>>(), ab.t);
    let back = m.mul_exact(&ab, &m.inverse_exact(&b));
    println!("(a·b)·b⁻¹ = a: {}", back == a);

    let delta = m.dilation(&BigRational::new(1.into(), 2.into()))?;
    let tau = m.left_translation(&a);
    let word = tau.compose(&delta)?;
    for (k, w) in word.w().iter().enumerate() {
        println!("(L_a ∘ δ_1/2) w{} = {w}", k + 1);
    }
    println!("(L_a ∘ δ_1/2) s  = {}", word.s());
    Ok(())
}
