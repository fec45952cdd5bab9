//! Checks that maps between Heisenberg models are CR, extracts their
//! structure data, and verifies the sphere inversion.

use crlab::crmaps::{cr_map_check, involution_check, map_structure_extract, sphere_inversion};
use crlab::heisenberg::{make_model, symplectic_block, ExactPoint, ModelSpec};
use crlab::sample::halton_box;
use crlab::scalar::GaussRat;
use num_rational::BigRational;

fn main() -> crlab::Result<()> {
    let m = make_model(2, symplectic_block(GaussRat::from_ints(1, 0)))?;
    let pts = halton_box(2, 1.0, 1.0, 8, 2)?;
    let q = ExactPoint {
        z: vec![GaussRat::from_fracs(1, 2, -1, 3), GaussRat::from_fracs(0, 1, 2, 1)],
        t: BigRational::new(3.into(), 4.into()),
    };
    let g = m.left_translation(&q).compose(&m.dilation(&BigRational::new(2.into(), 3.into()))?)?;

    let cr = cr_map_check(&g, &m, &m, &pts)?;
    println!("L_q ∘ δ is CR: {} (exact {})", cr.is_cr, cr.exact);
    let st = map_structure_extract(&g, &m, &m)?;
    println!("r = {}", st.r);
    println!("r identity exact: {}, P compatible exact: {}", st.r_identity_exact, st.p_compatible_exact);

    let conj = crlab::json::parse_map(
        r#"{"w": [{"terms": [{"coeff": [1, 1, 0, 1], "zbar": [1]}]}], "s": {"terms": [{"coeff": [1, 1, 0, 1], "t": 1}]}}"#,
        1,
    )
    .map_err(crlab::Error::from)?;
    let h0 = ModelSpec::heisenberg(1);
    let samples = halton_box(1, 1.0, 1.0, 8, 3)?;
    println!("(z, t) ↦ (z̄, t) is CR: {}", cr_map_check(&conj, &h0, &h0, &samples)?.is_cr);

    let iota = sphere_inversion(1)?;
    println!("ι w = {}", iota.w()[0]);
    let inv = involution_check(1, &samples)?;
    println!("ι ∘ ι = id: {}, CR: {}", inv.involutive, inv.cr.is_cr);
    Ok(())
}
