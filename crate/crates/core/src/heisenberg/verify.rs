use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::VectorField;
use crate::scalar::{GaussRat, RatFunc, Var};

use super::{ExactPoint, ModelSpec};

/// Exact checks of the group law, the frame brackets and the contact form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCheck {
    /// Associativity, unit and inverses on random rational points.
    pub group_axioms: bool,
    /// `[Z_α, Z_β] = −2P_{αβ}∂t` and `[Z_α, Z_β̄] = −2iδ_{αβ}∂t`.
    pub brackets: bool,
    /// `θ` is real, `θ(∂t) = 1`, `θ(Z_α) = 0`, `∂t⌟dθ = 0`.
    pub contact_form: bool,
    pub trials: usize,
}

impl ModelCheck {
    pub fn pass(&self) -> bool {
        self.group_axioms && self.brackets && self.contact_form
    }
}

fn small_rat(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::new(rng.random_range(-9i64..=9).into(), rng.random_range(1i64..=7).into())
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> ExactPoint {
    let z = (0..n).map(|_| GaussRat::new(small_rat(rng), small_rat(rng))).collect();
    ExactPoint { z, t: small_rat(rng) }
}

impl ModelSpec {
    /// Runs [`ModelCheck`] with `trials` random point triples drawn from `seed`.
    pub fn verify(&self, trials: usize, seed: u64) -> ModelCheck {
        let n = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let origin = ExactPoint::origin(n);
        let mut group_axioms = true;
        for _ in 0..trials {
            let (a, b, c) = (random_point(&mut rng, n), random_point(&mut rng, n), random_point(&mut rng, n));
            group_axioms &= self.mul_exact(&self.mul_exact(&a, &b), &c) == self.mul_exact(&a, &self.mul_exact(&b, &c));
            group_axioms &= self.mul_exact(&a, &self.inverse_exact(&a)) == origin;
            group_axioms &= self.mul_exact(&origin, &a) == a && self.mul_exact(&a, &origin) == a;
        }
        let r = self.ring();
        let frame = self.frame();
        let dt = VectorField::coordinate(r, Var::T);
        let mut brackets = true;
        for a in 0..n {
            for b in 0..n {
                let want = dt.scale(&RatFunc::constant(r, &self.p()[a][b] * &GaussRat::from(-2)));
                brackets &= frame[a].bracket(&frame[b]) == want;
                let want =
                    if a == b { dt.scale(&RatFunc::constant(r, GaussRat::from_ints(0, -2))) } else { VectorField::zero(r) };
                brackets &= frame[a].bracket(&frame[b].conj()) == want;
            }
        }
        let th = self.contact_form();
        let contact_form = th.is_real()
            && th.apply(&dt).is_one()
            && frame.iter().all(|z| th.apply(z).is_zero() && th.apply(&z.conj()).is_zero())
            && th.d().interior(&dt).is_zero();
        ModelCheck { group_axioms, brackets, contact_form, trials }
    }
}
