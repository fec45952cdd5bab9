#![allow(dead_code)]

use std::sync::Arc;

use crlab::exterior::{Form, RationalMap, VectorField};
use crlab::scalar::{GaussRat, Poly, RatFunc, Ring, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn coeff(rng: &mut ChaCha8Rng) -> GaussRat {
    GaussRat::from_fracs(rng.random_range(-5..=5), rng.random_range(1..=4), rng.random_range(-3..=3), rng.random_range(1..=3))
}

/// Up to `terms` monomials of total degree at most `deg`.
pub fn poly(rng: &mut ChaCha8Rng, ring: &Arc<Ring>, terms: usize, deg: i32) -> Poly {
    let w = 2 * ring.dim() + 1;
    let k = rng.random_range(1..=terms);
    Poly::from_terms(
        ring,
        (0..k).map(|_| {
            let mut m = vec![0i32; ring.width()];
            let mut left = rng.random_range(0..=deg);
            while left > 0 {
                m[rng.random_range(0..w)] += 1;
                left -= 1;
            }
            (coeff(rng), m)
        }),
    )
}

pub fn real_poly(rng: &mut ChaCha8Rng, ring: &Arc<Ring>, terms: usize, deg: i32) -> Poly {
    let p = poly(rng, ring, terms, deg);
    &p + &p.conj()
}

/// `p / (1 + q)` with `q` having no constant term, so the denominator is nonzero.
pub fn ratfunc(rng: &mut ChaCha8Rng, ring: &Arc<Ring>) -> RatFunc {
    let num = poly(rng, ring, 3, 2);
    if rng.random_bool(0.4) {
        return RatFunc::from_poly(num);
    }
    let mut q = poly(rng, ring, 2, 2);
    let zero = vec![0i32; ring.width()];
    q = Poly::from_terms(ring, q.terms().filter(|(m, _)| **m != zero).map(|(m, c)| (c.clone(), m.clone())));
    let den = &Poly::one(ring) + &q;
    RatFunc::new(num, den).expect("nonzero denominator")
}

pub fn form(rng: &mut ChaCha8Rng, ring: &Arc<Ring>, degree: usize) -> Form {
    let w = 2 * ring.dim() + 1;
    let k = rng.random_range(1..=3);
    let terms: Vec<(Vec<usize>, RatFunc)> = (0..k)
        .map(|_| {
            let mut idx: Vec<usize> = (0..w).collect();
            for i in 0..degree {
                let j = rng.random_range(i..w);
                idx.swap(i, j);
            }
            idx.truncate(degree);
            (idx, ratfunc(rng, ring))
        })
        .collect();
    Form::from_terms(ring, degree, terms)
}

pub fn polynomial_form(rng: &mut ChaCha8Rng, ring: &Arc<Ring>, degree: usize) -> Form {
    let w = 2 * ring.dim() + 1;
    let k = rng.random_range(1..=3);
    let terms: Vec<(Vec<usize>, RatFunc)> = (0..k)
        .map(|_| {
            let mut idx: Vec<usize> = (0..w).collect();
            for i in 0..degree {
                let j = rng.random_range(i..w);
                idx.swap(i, j);
            }
            idx.truncate(degree);
            (idx, RatFunc::from_poly(poly(rng, ring, 2, 2)))
        })
        .collect();
    Form::from_terms(ring, degree, terms)
}

pub fn field(rng: &mut ChaCha8Rng, ring: &Arc<Ring>) -> VectorField {
    let w = 2 * ring.dim() + 1;
    VectorField::from_coeffs(
        (0..w)
            .map(|_| if rng.random_bool(0.6) { RatFunc::from_poly(poly(rng, ring, 2, 2)) } else { RatFunc::zero(ring) })
            .collect(),
    )
}

/// A polynomial map with real `s`.
pub fn poly_map(rng: &mut ChaCha8Rng, ring: &Arc<Ring>) -> RationalMap {
    let n = ring.dim();
    let w = (0..n).map(|a| RatFunc::from_poly(&Poly::var(ring, Var::Z(a)) + &poly(rng, ring, 2, 2))).collect();
    let s = RatFunc::from_poly(&Poly::var(ring, Var::T) + &real_poly(rng, ring, 2, 2));
    RationalMap::new(n, w, s).expect("polynomial map")
}

pub fn coordinate_fields(ring: &Arc<Ring>) -> Vec<VectorField> {
    Var::all(ring.dim()).into_iter().map(|v| VectorField::coordinate(ring, v)).collect()
}

/// `(L_X β)(Y₁, …, Y_k) = X(β(Y)) − Σ β(…, [X, Y_i], …)` on coordinate fields,
/// compared with `X ⌟ dβ + d(X ⌟ β)`.
pub fn cartan_holds(beta: &Form, x: &VectorField) -> bool {
    let ring = beta.ring().clone();
    let k = beta.degree();
    let cartan = if k == 0 { beta.d().interior(x) } else { beta.d().interior(x).add(&beta.interior(x).d()) };
    let fields = coordinate_fields(&ring);
    let tuples: Vec<Vec<usize>> = crlab::pseudoherm::multi_indices(fields.len(), k).collect();
    tuples.iter().all(|idx| {
        let ys: Vec<&VectorField> = idx.iter().map(|&i| &fields[i]).collect();
        let mut lie = x.apply(&beta.eval(&ys));
        for i in 0..k {
            let br = x.bracket(ys[i]);
            let mut zs = ys.clone();
            zs[i] = &br;
            lie = &lie - &beta.eval(&zs);
        }
        lie == cartan.eval(&ys)
    })
}

pub fn data(name: &str) -> String {
    format!("tests/data/{name}")
}

/// Subcommand invocations with golden reports in `tests/golden`.
pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub exit: i32,
}

pub fn case(name: &'static str, exit: i32, args: &[&str]) -> Case {
    let args = args.iter().map(|a| if a.ends_with(".json") { data(a) } else { a.to_string() }).collect();
    Case { name, args, exit }
}

pub fn cases() -> Vec<Case> {
    vec![
        case("model_h0", 0, &["model", "--spec", "h0.json", "--verify"]),
        case("model_hp2", 0, &["model", "--spec", "hp2.json", "--verify", "--seed", "3"]),
        case("model_unverified", 0, &["model", "--spec", "hp2.json"]),
        case("tensors_hp2", 0, &["tensors", "--model", "hp2.json", "--samples", "plan_small.json"]),
        case(
            "tensors_conformal",
            0,
            &["tensors", "--model", "h0.json", "--conformal", "f_modulus.json", "--samples", "plan_small.json"],
        ),
        case("conformal_h0", 0, &["conformal", "--model", "h0.json", "--f", "f_linear.json", "--samples", "plan_explicit.json"]),
        case("conformal_hp2", 0, &["conformal", "--model", "hp2.json", "--f", "f_n2.json", "--samples", "plan_small.json"]),
        case(
            "canonical_origin",
            0,
            &[
                "canonical",
                "--model",
                "h0.json",
                "--phi",
                "phi_quarter.json",
                "--theta",
                "theta_density.json",
                "--samples",
                "plan_small.json",
            ],
        ),
        case(
            "canonical_shifted",
            0,
            &[
                "canonical",
                "--model",
                "h0.json",
                "--phi",
                "phi_shifted.json",
                "--theta",
                "theta_density.json",
                "--samples",
                "plan_small.json",
            ],
        ),
        case(
            "pipeline_hp2",
            0,
            &[
                "pipeline",
                "--model",
                "hp2.json",
                "--phi",
                "phi_quarter_n2.json",
                "--theta",
                "theta_conformal_n2.json",
                "--samples",
                "plan_four.json",
            ],
        ),
        case("classify_congruent", 0, &["classify", "--p", "hp2.json", "--pprime", "hp2_rotated.json"]),
        case("classify_distinct", 1, &["classify", "--p", "hp2.json", "--pprime", "hp2_scaled.json"]),
        case("crcheck_dilation", 0, &["crcheck", "--src", "hp2.json", "--dst", "hp2.json", "--map", "map_dilation_n2.json"]),
        case("crcheck_conjugation", 1, &["crcheck", "--src", "h0.json", "--dst", "h0.json", "--map", "map_conj.json"]),
        case("crcheck_inversion", 0, &["crcheck", "--src", "h0.json", "--dst", "h0.json", "--map", "map_inversion.json"]),
        case("flatness_hp2", 0, &["flatness", "--model", "hp2.json"]),
        case(
            "flatness_conformal",
            1,
            &["flatness", "--model", "h0.json", "--conformal", "f_modulus.json", "--samples", "plan_small.json"],
        ),
    ]
}
