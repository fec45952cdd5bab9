//! Decides congruence `P′ = Uᵀ P U` of complex skew matrices through their
//! Youla normal forms and returns a unitary witness.

use crlab::heisenberg::{classify_congruence, youla};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> crlab::Result<()> {
    let p = DMatrix::from_row_slice(
        3,
        3,
        &[c(0., 0.), c(1., 2.), c(0., -1.), c(-1., -2.), c(0., 0.), c(3., 0.), c(0., 1.), c(-3., 0.), c(0., 0.)],
    );
    let y = youla(&p)?;
    println!("singular values of P: {:?}", y.singular_values);

    let th = 0.7f64;
    let u = DMatrix::from_row_slice(
        3,
        3,
        &[
            c(th.cos(), 0.),
            c(0., th.sin()),
            c(0., 0.),
            c(0., th.sin()),
            c(th.cos(), 0.),
            c(0., 0.),
            c(0., 0.),
            c(0., 0.),
            c(0., 1.),
        ],
    );
    let pp = u.transpose() * &p * &u;
    let same = classify_congruence(&p, &pp)?;
    println!("congruent: {}, residual {:.2e}", same.equivalent, same.residual);
    if let Some(w) = same.witness {
        println!("‖P − Wᵀ P′ W‖ = {:.2e}", (&p - w.transpose() * &pp * &w).norm());
    }

    let other = pp.scale(1.01);
    let diff = classify_congruence(&p, &other)?;
    println!("after scaling by 1.01: congruent {}, σ(P′) = {:?}", diff.equivalent, diff.sv_pprime);
    Ok(())
}
