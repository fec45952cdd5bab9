//! Sample plans: explicit point lists or shifted Halton points in a box.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::GroupPoint;

const PRIMES: [u8; 25] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

#[derive(Clone, Debug, PartialEq)]
pub enum SampleMode {
    Explicit(Vec<GroupPoint>),
    /// Points with `|z| ≤ z_radius`, `|t| ≤ t_radius`.
    Box {
        z_radius: f64,
        t_radius: f64,
        count: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplePlan {
    pub mode: SampleMode,
    pub tolerance: f64,
    pub kmax: usize,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan::quasirandom(64, 0)
    }
}

impl SamplePlan {
    /// The unit box with `count` points and the default tolerance `1e-8`, `kmax = 200`.
    pub fn quasirandom(count: usize, seed: u64) -> Self {
        SamplePlan { mode: SampleMode::Box { z_radius: 1.0, t_radius: 1.0, count, seed }, tolerance: 1e-8, kmax: 200 }
    }

    pub fn explicit(points: Vec<GroupPoint>) -> Self {
        SamplePlan { mode: SampleMode::Explicit(points), tolerance: 1e-8, kmax: 200 }
    }

    pub fn with_box(mut self, z_radius: f64, t_radius: f64) -> Self {
        if let SampleMode::Box { count, seed, .. } = self.mode {
            self.mode = SampleMode::Box { z_radius, t_radius, count, seed };
        }
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_kmax(mut self, kmax: usize) -> Self {
        self.kmax = kmax;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        match &self.mode {
            SampleMode::Explicit(p) if p.is_empty() => Err(Error::Invalid("no sample points".into())),
            SampleMode::Explicit(p) if p.iter().any(|x| !x.is_finite()) => {
                Err(Error::Invalid("sample point is not finite".into()))
            }
            SampleMode::Box { count: 0, .. } => Err(Error::Invalid("count must be at least 1".into())),
            SampleMode::Box { z_radius, t_radius, .. }
                if !(z_radius.is_finite() && t_radius.is_finite() && *z_radius >= 0.0 && *t_radius >= 0.0) =>
            {
                Err(Error::Invalid("box radii must be finite and non-negative".into()))
            }
            _ => Ok(()),
        }
    }

    /// The points of the plan on a patch of dimension `n`.
    pub fn points(&self, n: usize) -> Result<Vec<GroupPoint>> {
        self.validate()?;
        match &self.mode {
            SampleMode::Explicit(p) => {
                if p.iter().any(|x| x.dim() != n) {
                    return Err(Error::Dimension(format!("sample points must have {n} complex coordinates")));
                }
                Ok(p.clone())
            }
            SampleMode::Box { z_radius, t_radius, count, seed } => halton_box(n, *z_radius, *t_radius, *count, *seed),
        }
    }
}

/// Cranley–Patterson shifted Halton points; each `z^α` fills a disk of radius
/// `z_radius/√n`.
pub fn halton_box(n: usize, z_radius: f64, t_radius: f64, count: usize, seed: u64) -> Result<Vec<GroupPoint>> {
    let dims = 2 * n + 1;
    if dims > PRIMES.len() {
        return Err(Error::Dimension(format!("at most {} real dimensions are supported", PRIMES.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
    let rz = if n == 0 { 0.0 } else { z_radius / (n as f64).sqrt() };
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        let u: Vec<f64> = (0..dims).map(|d| (halton::number(PRIMES[d], k) + shift[d]).fract()).collect();
        let z = (0..n).map(|a| Complex64::from_polar(rz * u[2 * a].sqrt(), std::f64::consts::TAU * u[2 * a + 1])).collect();
        out.push(GroupPoint::new(z, t_radius * (2.0 * u[2 * n] - 1.0)));
    }
    Ok(out)
}
