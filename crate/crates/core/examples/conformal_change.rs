//! Rescales the contact form by `e^{2f}`, recomputes every tensor from scratch,
//! and compares against the closed-form change formulas at sample points.

use crlab::conformal::{cross_validate, transform_coframe, ConformalChange, Reading};
use crlab::heisenberg::ModelSpec;
use crlab::pseudoherm::{solve_connection, PHStructure};
use crlab::sample::halton_box;
use crlab::scalar::{GaussRat, Poly, Var};

fn main() -> crlab::Result<()> {
    let m = ModelSpec::heisenberg(1);
    let r = m.ring();
    let s = PHStructure::new(m.contact_form(), m.coframe())?;
    let f = &(&Poly::var(r, Var::Z(0)) * &Poly::var(r, Var::Zbar(0))) + &Poly::var(r, Var::T).scale(&GaussRat::rational(1, 3));
    println!("f = {f}");

    let change = ConformalChange::new(f.clone(), &s)?;
    for (a, v) in change.v_bar().iter().enumerate() {
        println!("v^{} = {v}", a + 1);
    }
    let changed = transform_coframe(&change, &s)?;
    let ts = solve_connection(&changed)?;
    println!("new structure certified: {}", ts.certificate.all());
    for (name, t) in ts.named() {
        if !t.is_zero() {
            println!("{name:>12}: {} nonzero entries", t.nonzero_entries().len());
        }
    }

    let pts = halton_box(1, 1.0, 1.0, 16, 3)?;
    let cv = cross_validate(f, &s, Reading::default(), &pts, 1e-9)?;
    println!("reading: {}", Reading::default().describe());
    println!("all tensors agree: {} (max deviation {:.2e})", cv.pass, cv.max_deviation());
    Ok(())
}
