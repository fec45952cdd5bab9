//! Solves for the canonical connection of a Heisenberg model, prints its
//! certificate, and confirms the model is flat with `p = P`.

use crlab::heisenberg::{make_model, symplectic_block};
use crlab::pseudoherm::{flatness_test, PHStructure};
use crlab::scalar::GaussRat;

fn main() -> crlab::Result<()> {
    let m = make_model(2, symplectic_block(GaussRat::from_fracs(1, 2, 1, 2)))?;
    let s = PHStructure::new(m.contact_form(), m.coframe())?;
    let (report, ts) = flatness_test(&s)?;
    let c = &ts.certificate;
    println!("certificate: all exact = {}", c.all());
    println!("ω identically zero: {}", ts.connection.is_zero());
    for (name, t) in ts.named() {
        println!(
            "{name:>12}: {}",
            if t.is_zero() { "0".to_string() } else { format!("{} nonzero entries", t.nonzero_entries().len()) }
        );
    }
    println!("flat: {}", report.flat);
    if let Some(p) = report.p {
        for row in p {
            println!("  p = [{}]", row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "));
        }
    }
    Ok(())
}
