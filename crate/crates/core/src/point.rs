use num_complex::Complex64;

/// A point `(z, t)` of the coordinate patch `ℂⁿ × ℝ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint {
    pub z: Vec<Complex64>,
    pub t: f64,
}

impl GroupPoint {
    pub fn new(z: Vec<Complex64>, t: f64) -> Self {
        Self { z, t }
    }

    pub fn origin(n: usize) -> Self {
        Self { z: vec![Complex64::new(0.0, 0.0); n], t: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.z.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Coordinate values in the order `(z¹..zⁿ, z̄¹..z̄ⁿ, t)`.
    pub fn coords(&self) -> Vec<Complex64> {
        let mut v = self.z.clone();
        v.extend(self.z.iter().map(|c| c.conj()));
        v.push(Complex64::new(self.t, 0.0));
        v
    }

    /// `|z|²`.
    pub fn z_norm_sqr(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Heisenberg gauge `(|z|⁴ + t²)^{1/4}`.
    pub fn gauge(&self) -> f64 {
        let r2 = self.z_norm_sqr();
        (r2 * r2 + self.t * self.t).powf(0.25)
    }

    pub fn max_abs_diff(&self, other: &GroupPoint) -> f64 {
        let dz = self.z.iter().zip(&other.z).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        dz.max((self.t - other.t).abs())
    }
}
