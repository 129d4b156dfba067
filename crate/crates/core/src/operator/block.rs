use faer::{Mat, MatRef};

use crate::linalg;
use crate::C64;

/// Small dense `rank × rank` block, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    rank: usize,
    data: Vec<C64>,
}

impl Block {
    pub fn zeros(rank: usize) -> Self {
        Self { rank, data: vec![C64::new(0.0, 0.0); rank * rank] }
    }

    pub fn identity(rank: usize) -> Self {
        Self::scalar(rank, C64::new(1.0, 0.0))
    }

    pub fn scalar(rank: usize, z: C64) -> Self {
        Self::from_fn(rank, |i, j| if i == j { z } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn(rank: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                data.push(f(i, j));
            }
        }
        Self { rank, data }
    }

    pub fn from_mat(m: MatRef<'_, C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }

    pub fn to_mat(&self) -> Mat<C64> {
        Mat::from_fn(self.rank, self.rank, |i, j| self.get(i, j))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.rank + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self.data[i * self.rank + j] = z;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.rank, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let r = self.rank;
        let mut out = Self::zeros(r);
        for i in 0..r {
            for k in 0..r {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..r {
                    out.data[i * r + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { rank: self.rank, data: self.data.iter().map(|a| a * z).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rank).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm.
    pub fn norm(&self) -> f64 {
        match self.rank {
            0 => 0.0,
            1 => self.data[0].norm(),
            _ => linalg::operator_norm(self.to_mat().as_ref()).unwrap_or_else(|_| self.frobenius()),
        }
    }

    /// `self ⊗ other`, with `self` as the outer (slow) index.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.rank, other.rank);
        Self::from_fn(a * b, |i, j| self.get(i / b, j / b) * other.get(i % b, j % b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}
