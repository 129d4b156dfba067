use std::f64::consts::TAU;
use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Lattice, LatticeKind};
use crate::linalg;
use crate::models::FredholmModule;
use crate::C64;

/// Truncation data for the Hardy module on an `N`-point circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardySpec {
    /// Largest |winding| the module will be paired with; needs `N ≥ 4·max_winding`.
    #[serde(default = "default_winding")]
    pub max_winding: usize,
    /// Trace window: modes `|j| < window` (default `N/4`).
    #[serde(default)]
    pub trace_window: Option<usize>,
}

fn default_winding() -> usize {
    3
}

impl Default for HardySpec {
    fn default() -> Self {
        Self { max_winding: default_winding(), trace_window: None }
    }
}

/// Modes `j ∈ [−N/2, N/2)`; the "nonnegative" half is `[0, N/2)`.
fn signed_mode(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Circulant matrix `(1/N) Σ_{j∈modes} e^{2πi j (x−y)/N}`, built from one row
/// so that rotation invariance holds bit for bit.
fn mode_projector(n: usize, keep: impl Fn(i64) -> bool) -> Mat<C64> {
    let row: Vec<C64> = (0..n)
        .map(|d| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                let m = signed_mode(j, n);
                if keep(m) {
                    acc += C64::from_polar(1.0, TAU * (m * d as i64).rem_euclid(n as i64) as f64 / n as f64);
                }
            }
            acc / n as f64
        })
        .collect();
    Mat::from_fn(n, n, |x, y| row[(x + n - y) % n])
}

/// Hardy module: `F = 2P − 1` with `P` the projection onto the modes
/// `[0, N/2)`, ungraded and involutive, with the trace window attached.
pub fn hardy_module(lattice: &Arc<Lattice>, spec: HardySpec) -> Result<FredholmModule> {
    if lattice.kind() != LatticeKind::Circle {
        return Err(Error::InvalidGeometry("the Hardy module lives on a circle".into()));
    }
    let n = lattice.len();
    let required = (4 * spec.max_winding).max(8);
    if n < required {
        return Err(Error::CircleTooSmall { sites: n, required });
    }
    let window = spec.trace_window.unwrap_or(n / 4);
    if window <= spec.max_winding || window > n / 2 {
        return Err(Error::InvalidArgument(format!("trace window {window} must lie in ({}, {}]", spec.max_winding, n / 2)));
    }
    let p = mode_projector(n, |m| m >= 0);
    let f = Mat::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        p[(i, j)] * 2.0 - C64::new(id, 0.0)
    });
    let chi = mode_projector(n, |m| m.unsigned_abs() < window as u64);
    FredholmModule::new(lattice.clone(), 1, f, None, true)?.with_trace_window(chi)
}

/// `e^{ikθ}` sampled on the circle.
pub fn winding_symbol(n: usize, k: i64) -> Vec<C64> {
    (0..n).map(|x| C64::from_polar(1.0, TAU * (k * x as i64).rem_euclid(n as i64) as f64 / n as f64)).collect()
}

/// Fredholm index of the Toeplitz compression of multiplication by `u`.
///
/// With Fourier coefficients `û` of bandwidths `b₊` (positive) and `b₋`
/// (negative), the compression maps the modes `[0, M + b₋)` into
/// `[0, M + b₊)`, `M = N/2`, so that the truncation edge cannot create
/// spurious kernel; the index is `dim ker − dim coker` from singular values.
pub fn toeplitz_index(u: &[C64]) -> Result<i64> {
    let n = u.len();
    for (x, z) in u.iter().enumerate() {
        if (z.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::NonUnimodular { site: x, modulus: z.norm() });
        }
    }
    if n < 8 {
        return Err(Error::CircleTooSmall { sites: n, required: 8 });
    }
    let coeff: Vec<C64> = (0..n)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (x, z) in u.iter().enumerate() {
                acc += z * C64::from_polar(1.0, -TAU * ((j * x) % n) as f64 / n as f64);
            }
            acc / n as f64
        })
        .collect();
    let tol = 1e-10;
    let mut b_plus = 0usize;
    let mut b_minus = 0usize;
    for (j, c) in coeff.iter().enumerate() {
        if c.norm() > tol {
            let m = signed_mode(j, n);
            if m > 0 {
                b_plus = b_plus.max(m as usize);
            } else if m < 0 {
                b_minus = b_minus.max(m.unsigned_abs() as usize);
            }
        }
    }
    let band = b_plus.max(b_minus);
    if n < 4 * band {
        return Err(Error::CircleTooSmall { sites: n, required: 4 * band });
    }
    let half = n / 2;
    let rows = half + b_plus;
    let cols = half + b_minus;
    let coef_at = |d: i64| -> C64 {
        if d.unsigned_abs() as usize > band {
            C64::new(0.0, 0.0)
        } else {
            coeff[d.rem_euclid(n as i64) as usize]
        }
    };
    let t = Mat::from_fn(rows, cols, |i, j| coef_at(i as i64 - j as i64));
    linalg::fredholm_index(t.as_ref())
}
