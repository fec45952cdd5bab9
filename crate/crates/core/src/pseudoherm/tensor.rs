use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::point::GroupPoint;
use crate::scalar::{RatFunc, Ring};

/// Index type of one tensor slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Up,
    UpBar,
    Low,
    LowBar,
}

impl Slot {
    pub fn conj(self) -> Slot {
        match self {
            Slot::Up => Slot::UpBar,
            Slot::UpBar => Slot::Up,
            Slot::Low => Slot::LowBar,
            Slot::LowBar => Slot::Low,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Slot::Up => "^",
            Slot::UpBar => "^~",
            Slot::Low => "_",
            Slot::LowBar => "_~",
        }
    }
}

fn strides(n: usize, k: usize) -> Vec<usize> {
    let mut s = vec![1; k];
    for i in (0..k.saturating_sub(1)).rev() {
        s[i] = s[i + 1] * n;
    }
    s
}

/// Multi-index iterator over `{0..n}^k` in row-major order.
pub fn multi_indices(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(k as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; k];
        for slot in (0..k).rev() {
            idx[slot] = flat % n;
            flat /= n;
        }
        idx
    })
}

/// A tensor with exact coefficients in a frame, stored row-major.
#[derive(Clone, PartialEq)]
pub struct Tensor {
    pub n: usize,
    pub slots: Vec<Slot>,
    pub data: Vec<RatFunc>,
}

impl Tensor {
    pub fn zeros(ring: &Arc<Ring>, n: usize, slots: Vec<Slot>) -> Self {
        let len = n.pow(slots.len() as u32);
        Self { n, slots, data: vec![RatFunc::zero(ring); len] }
    }

    pub fn from_fn(n: usize, slots: Vec<Slot>, mut f: impl FnMut(&[usize]) -> RatFunc) -> Self {
        let data = multi_indices(n, slots.len()).map(|i| f(&i)).collect();
        Self { n, slots, data }
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn flat(&self, idx: &[usize]) -> usize {
        strides(self.n, idx.len()).iter().zip(idx).map(|(s, i)| s * i).sum()
    }

    pub fn get(&self, idx: &[usize]) -> &RatFunc {
        &self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: RatFunc) {
        let k = self.flat(idx);
        self.data[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFunc::is_zero)
    }

    /// Complex conjugate tensor, with every slot type conjugated.
    pub fn conj(&self) -> Tensor {
        Tensor {
            n: self.n,
            slots: self.slots.iter().map(|s| s.conj()).collect(),
            data: self.data.iter().map(RatFunc::conj).collect(),
        }
    }

    pub fn sub(&self, o: &Tensor) -> Result<Tensor> {
        if self.slots != o.slots || self.n != o.n {
            return Err(Error::Dimension("tensor types differ".into()));
        }
        Ok(Tensor { n: self.n, slots: self.slots.clone(), data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() })
    }

    pub fn eval(&self, x: &GroupPoint) -> NumTensor {
        NumTensor { n: self.n, slots: self.slots.clone(), data: self.data.iter().map(|f| f.eval(x, &[])).collect() }
    }

    /// Nonzero coefficients as `(multi-index, exact string)`.
    pub fn nonzero_entries(&self) -> Vec<(Vec<usize>, String)> {
        multi_indices(self.n, self.rank())
            .zip(&self.data)
            .filter(|(_, f)| !f.is_zero())
            .map(|(i, f)| (i, f.to_string()))
            .collect()
    }
}

impl std::fmt::Debug for Tensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sig: String = self.slots.iter().map(|s| s.symbol()).collect::<Vec<_>>().join("");
        write!(f, "Tensor[{sig}]{:?}", self.nonzero_entries())
    }
}

/// A tensor evaluated at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct NumTensor {
    pub n: usize,
    pub slots: Vec<Slot>,
    pub data: Vec<Complex64>,
}

impl NumTensor {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_deviation(&self, o: &NumTensor) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Applies `m` to slot `k`: `out[.., a, ..] = Σ_c m[a][c] self[.., c, ..]`.
    fn contract_slot(&self, k: usize, m: &DMatrix<Complex64>) -> NumTensor {
        let n = self.n;
        let st = strides(n, self.slots.len());
        let mut out = vec![Complex64::new(0.0, 0.0); self.data.len()];
        for (flat, o) in out.iter_mut().enumerate() {
            let a = (flat / st[k]) % n;
            let base = flat - a * st[k];
            for c in 0..n {
                *o += m[(a, c)] * self.data[base + c * st[k]];
            }
        }
        NumTensor { n, slots: self.slots.clone(), data: out }
    }

    /// `‖T‖² = T_{a…} conj(T_{c…}) Π G(a_i, c_i)` with `g_{αβ̄}` on upper slots
    /// and `g^{αβ̄}` on lower ones.
    pub fn norm_sqr(&self, g: &DMatrix<Complex64>) -> Result<f64> {
        let n = self.n;
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::Dimension("metric has the wrong size".into()));
        }
        if self.data.is_empty() {
            return Ok(0.0);
        }
        let eig = g.clone().symmetric_eigen();
        let scale = g.norm().max(1.0);
        if (g - g.adjoint()).norm() > 1e-10 * scale || eig.eigenvalues.iter().any(|&e| e <= 1e-12 * scale) {
            return Err(Error::NotPositive("Levi form is not positive definite".into()));
        }
        let ginv = g.clone().try_inverse().ok_or_else(|| Error::NotPositive("singular Levi form".into()))?;
        // g^{αβ̄} = (g⁻¹)ᵗ
        let h = ginv.transpose();
        let mut m = NumTensor { n, slots: self.slots.clone(), data: self.data.iter().map(|c| c.conj()).collect() };
        for (k, s) in self.slots.iter().enumerate() {
            let mat = match s {
                Slot::Up => g.clone(),
                Slot::UpBar => g.transpose(),
                Slot::Low => h.clone(),
                Slot::LowBar => h.transpose(),
            };
            m = m.contract_slot(k, &mat);
        }
        let s: Complex64 = self.data.iter().zip(&m.data).map(|(a, b)| a * b).sum();
        Ok(s.re.max(0.0))
    }

    pub fn norm(&self, g: &DMatrix<Complex64>) -> Result<f64> {
        self.norm_sqr(g).map(f64::sqrt)
    }
}

/// Numeric Levi matrix `g_{αβ̄}` of a structure at a point.
pub fn metric_at(g: &[Vec<RatFunc>], x: &GroupPoint) -> DMatrix<Complex64> {
    let n = g.len();
    DMatrix::from_fn(n, n, |a, b| g[a][b].eval(x, &[]))
}
