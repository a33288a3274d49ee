//! Points and tangent vectors in `C^n`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A point of `C^n`, serialized as `[[re, im], ...]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CVec(pub Vec<C64>);

impl CVec {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::argument("complex vector must have dimension >= 1"));
        }
        if components.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::argument("complex vector has non-finite components"));
        }
        Ok(CVec(components))
    }

    pub fn zeros(n: usize) -> Self {
        CVec(vec![C64::new(0.0, 0.0); n])
    }

    /// The `k`-th standard basis vector.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_reals(xs: &[f64]) -> Self {
        CVec(xs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn scalar(z: C64) -> Self {
        CVec(vec![z])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, C64> {
        self.0.iter()
    }

    /// Hermitian product `<self, other> = sum self_j * conj(other_j)`.
    pub fn inner(&self, other: &CVec) -> C64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Sup norm `max_j |z_j|`.
    pub fn sup_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> CVec {
        CVec(self.0.iter().map(|c| c * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> CVec {
        CVec(self.0.iter().map(|c| c * s).collect())
    }

    pub fn dist(&self, other: &CVec) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Flatten into `[re_0, im_0, re_1, im_1, ...]`.
    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn from_real(xs: &[f64]) -> CVec {
        CVec(xs.chunks(2).map(|p| C64::new(p[0], p[1])).collect())
    }

    pub(crate) fn check_dim(&self, n: usize, what: &str) -> Result<()> {
        if self.dim() != n {
            return Err(Error::argument(format!(
                "{what} has dimension {}, expected {n}",
                self.dim()
            )));
        }
        Ok(())
    }
}

impl Index<usize> for CVec {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVec {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add<&CVec> for &CVec {
    type Output = CVec;
    fn add(self, rhs: &CVec) -> CVec {
        CVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&CVec> for &CVec {
    type Output = CVec;
    fn sub(self, rhs: &CVec) -> CVec {
        CVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &CVec {
    type Output = CVec;
    fn mul(self, rhs: f64) -> CVec {
        self.scale_re(rhs)
    }
}

impl From<C64> for CVec {
    fn from(z: C64) -> Self {
        CVec(vec![z])
    }
}

/// A tangent vector `v` based at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: CVec,
    pub direction: CVec,
}

impl TangentVector {
    pub fn new(base: CVec, direction: CVec) -> Result<Self> {
        direction.check_dim(base.dim(), "tangent direction")?;
        Ok(Self { base, direction })
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
