//! Full pipeline: canonical contact form of a contraction, torsion and
//! curvature decay along the orbit, naturality, flatness of the limit and
//! recovery of the model's skew matrix up to congruence.

use crlab::conformal::{transform_coframe, ConformalChange};
use crlab::dynamics::{theorem_main_pipeline, ContractionSpec};
use crlab::heisenberg::{make_model, symplectic_block, ExactPoint};
use crlab::pseudoherm::PHStructure;
use crlab::sample::halton_box;
use crlab::scalar::{GaussRat, Poly, Var};
use num_rational::BigRational;

fn main() -> crlab::Result<()> {
    let m = make_model(2, symplectic_block(GaussRat::from_ints(1, 0)))?;
    let r = m.ring();
    let s = PHStructure::new(m.contact_form(), m.coframe())?;
    let f = &(&Poly::var(r, Var::Z(0)) + &Poly::var(r, Var::Zbar(0))).scale(&GaussRat::rational(1, 2))
        + &Poly::var(r, Var::T).scale(&GaussRat::rational(1, 3));
    let theta = transform_coframe(&ConformalChange::new(f, &s)?, &s)?.theta;

    let spec = ContractionSpec::composed(&m, &ExactPoint::origin(2), None, &BigRational::new(1.into(), 4.into()))?;
    let pts = halton_box(2, 1.0, 1.0, 4, 10)?;
    let rep = theorem_main_pipeline(&spec, &theta, &pts, 1e-8, 200)?;

    println!("canonical form: {} iterations, rate {:?}", rep.canonical.iterations, rep.canonical.rate);
    println!("{:<12} {:>8} {:>8} {:>10}", "tensor", "expected", "fitted", "status");
    for d in &rep.decay {
        let fit = d.fitted.map_or("-".into(), |v| format!("{v:.4}"));
        println!("{:<12} {:>8} {:>8} {:>10}", d.name, d.expected, fit, d.status.as_str());
    }
    println!("naturality residual {:.2e}", rep.naturality_residual);
    println!("limit flat: {} (at iteration {:?})", rep.flat, rep.flat_at);
    println!("recovered P congruent to model: {}", rep.congruence.equivalent);
    println!("pipeline pass: {}", rep.pass);
    Ok(())
}
