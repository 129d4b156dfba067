//! Filter functions of self-adjoint operators and their kernels.

use std::f64::consts::PI;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{Block, FinitePropOperator};
use crate::C64;

/// Real filter `f` applied through the functional calculus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FilterFunction {
    /// `e^{−t x²}`.
    Gaussian { t: f64 },
    /// Piecewise-linear profile on `|x|`; constant beyond the last abscissa.
    Table { abscissae: Vec<f64>, values: Vec<f64> },
}

impl Default for FilterFunction {
    fn default() -> Self {
        FilterFunction::Gaussian { t: 1.0 }
    }
}

impl FilterFunction {
    pub fn gaussian(t: f64) -> Self {
        FilterFunction::Gaussian { t }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            FilterFunction::Gaussian { t } => (-t * x * x).exp(),
            FilterFunction::Table { abscissae, values } => {
                let a = x.abs();
                match abscissae.iter().position(|&n| n > a) {
                    Some(0) => values[0],
                    Some(k) => {
                        let (x0, x1) = (abscissae[k - 1], abscissae[k]);
                        let s = (a - x0) / (x1 - x0);
                        values[k - 1] * (1.0 - s) + values[k] * s
                    }
                    None => *values.last().unwrap_or(&0.0),
                }
            }
        }
    }

    pub fn value_at_zero(&self) -> f64 {
        self.eval(0.0)
    }

    /// Parity probed on a fixed grid; exact for both closed forms.
    pub fn is_even(&self) -> bool {
        (0..=64).all(|k| {
            let x = k as f64 / 8.0;
            self.eval(x) == self.eval(-x)
        })
    }

    fn validate(&self) -> Result<()> {
        match self {
            FilterFunction::Gaussian { t } if !(*t > 0.0 && t.is_finite()) => {
                Err(Error::FilterNotAdmissible(format!("gaussian width t = {t} must be positive")))
            }
            FilterFunction::Table { abscissae, values } => {
                if abscissae.is_empty() || abscissae.len() != values.len() {
                    return Err(Error::FilterNotAdmissible("table needs matching, nonempty columns".into()));
                }
                if abscissae[0] != 0.0 || abscissae.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::FilterNotAdmissible("table abscissae must start at 0 and increase".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Requirements for index use: even and `f(0) = 1`.
    pub fn check_index_admissible(&self) -> Result<()> {
        self.validate()?;
        if !self.is_even() {
            return Err(Error::FilterNotAdmissible("filter is not even".into()));
        }
        let f0 = self.value_at_zero();
        if (f0 - 1.0).abs() > f64::EPSILON {
            return Err(Error::FilterNotAdmissible(format!("f(0) = {f0} instead of 1")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FilterMethod {
    Eigen,
    Chebyshev {
        #[serde(default = "default_cap")]
        cap: usize,
        #[serde(default = "default_target")]
        target: f64,
    },
}

fn default_cap() -> usize {
    2000
}

fn default_target() -> f64 {
    1e-10
}

impl FilterMethod {
    pub fn chebyshev() -> Self {
        FilterMethod::Chebyshev { cap: default_cap(), target: default_target() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MethodTag {
    Eigen,
    Chebyshev { degree: usize, enclosure: f64, residual_bound: f64 },
}

/// Materialized `f(D)`.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub operator: FinitePropOperator,
    pub method: MethodTag,
}

impl KernelMatrix {
    pub fn degree(&self) -> Option<usize> {
        match self.method {
            MethodTag::Chebyshev { degree, .. } => Some(degree),
            MethodTag::Eigen => None,
        }
    }

    pub fn residual_bound(&self) -> Option<f64> {
        match self.method {
            MethodTag::Chebyshev { residual_bound, .. } => Some(residual_bound),
            MethodTag::Eigen => None,
        }
    }
}

pub fn apply_filter(d: &FinitePropOperator, f: &FilterFunction, method: FilterMethod) -> Result<KernelMatrix> {
    f.validate()?;
    let dev = d.hermitian_deviation();
    if dev > 1e-10 {
        return Err(Error::NotSelfAdjoint(dev));
    }
    match method {
        FilterMethod::Eigen => {
            let m = linalg::hermitian_function(d.to_dense().as_ref(), |x| f.eval(x))?;
            Ok(KernelMatrix {
                operator: FinitePropOperator::from_dense(d.lattice().clone(), d.rank(), m)?,
                method: MethodTag::Eigen,
            })
        }
        FilterMethod::Chebyshev { cap, target } => chebyshev_filter(d, f, cap, target),
    }
}

/// `a` with `spec(D) ⊂ [−a, a]`: 50 power iterations on `D²` inflated by 1%,
/// never above the (rigorous) largest absolute row sum.
pub fn spectral_enclosure(d: &FinitePropOperator) -> f64 {
    let dim = d.dim();
    let mut v: Vec<C64> = (0..dim).map(|i| C64::new(1.0 + 0.5 * ((i as f64) * 0.7).sin(), 0.0)).collect();
    let mut estimate: f64 = 0.0;
    for _ in 0..50 {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        for z in &mut v {
            *z /= norm;
        }
        let w = d.apply(&d.apply(&v));
        estimate = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum::<f64>().max(0.0).sqrt();
        v = w;
    }
    let rows = row_sum_bound(d);
    (1.01 * estimate).min(rows).max(f64::MIN_POSITIVE)
}

fn row_sum_bound(d: &FinitePropOperator) -> f64 {
    let r = d.rank();
    let mut sums = vec![0.0; d.dim()];
    for (x, _, b) in d.blocks() {
        for i in 0..r {
            for j in 0..r {
                sums[x * r + i] += b.get(i, j).norm();
            }
        }
    }
    sums.into_iter().fold(0.0, f64::max)
}

/// Chebyshev coefficients of `f(a·s)` on `s ∈ [−1, 1]`, `c₀` already halved,
/// by cosine quadrature at `nodes` points.
pub fn chebyshev_coefficients(f: &FilterFunction, a: f64, degree: usize, nodes: usize) -> Vec<f64> {
    let theta: Vec<f64> = (0..nodes).map(|j| PI * (j as f64 + 0.5) / nodes as f64).collect();
    let samples: Vec<f64> = theta.iter().map(|&t| f.eval(a * t.cos())).collect();
    (0..=degree)
        .map(|k| {
            let s: f64 = theta.iter().zip(&samples).map(|(&t, &v)| v * (k as f64 * t).cos()).sum();
            let c = 2.0 * s / nodes as f64;
            if k == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

/// Smallest degree whose dropped tail (within the computed coefficients)
/// meets `target`.
fn truncation(coeffs: &[f64], target: f64) -> Option<(usize, f64)> {
    let mut tail = 0.0;
    let mut best = None;
    for k in (1..coeffs.len()).rev() {
        tail += coeffs[k].abs();
        if tail > target {
            break;
        }
        best = Some((k - 1, tail));
    }
    best
}

fn chebyshev_filter(d: &FinitePropOperator, f: &FilterFunction, cap: usize, target: f64) -> Result<KernelMatrix> {
    if !(target > 0.0) || cap < 2 {
        return Err(Error::InvalidArgument("chebyshev target must be positive and cap at least 2".into()));
    }
    let a = spectral_enclosure(d);
    let mut probe = 16.min(cap);
    let (coeffs, degree, dropped) = loop {
        let coeffs = chebyshev_coefficients(f, a, probe, 4 * probe);
        match truncation(&coeffs, target) {
            Some((deg, tail)) if deg < probe => break (coeffs, deg, tail),
            _ => {}
        }
        if probe >= cap {
            let tail = coeffs[probe / 2..].iter().map(|c| c.abs()).sum();
            return Err(Error::DegreeCap { cap, tail, target });
        }
        probe = (2 * probe).min(cap);
    };
    let dim = d.dim();
    let scale = C64::new(1.0 / a, 0.0);
    let two_scale = C64::new(2.0 / a, 0.0);
    let mut prev = Mat::<C64>::identity(dim, dim);
    let mut acc = Mat::<C64>::zeros(dim, dim);
    add_scaled(&mut acc, &prev, coeffs[0]);
    if degree >= 1 {
        let mut cur = scaled(d.apply_mat(prev.as_ref()), scale);
        add_scaled(&mut acc, &cur, coeffs[1]);
        for &c in &coeffs[2..=degree] {
            let mut next = scaled(d.apply_mat(cur.as_ref()), two_scale);
            for j in 0..dim {
                for i in 0..dim {
                    next[(i, j)] -= prev[(i, j)];
                }
            }
            add_scaled(&mut acc, &next, c);
            prev = cur;
            cur = next;
        }
    }
    // Rounding in the recurrence: each |T_k| ≤ 1 picks up O(k·ε) relative error.
    let mass: f64 = coeffs[..=degree].iter().map(|c| c.abs()).sum();
    let rounding = 16.0 * f64::EPSILON * (degree as f64 + 1.0).powi(2) * mass * (dim as f64).sqrt();
    Ok(KernelMatrix {
        operator: FinitePropOperator::from_dense(d.lattice().clone(), d.rank(), acc)?,
        method: MethodTag::Chebyshev { degree, enclosure: a, residual_bound: dropped + rounding },
    })
}

fn scaled(mut m: Mat<C64>, z: C64) -> Mat<C64> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            m[(i, j)] *= z;
        }
    }
    m
}

fn add_scaled(acc: &mut Mat<C64>, m: &Mat<C64>, c: f64) {
    if c == 0.0 {
        return;
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc[(i, j)] += m[(i, j)] * c;
        }
    }
}

pub fn kernel_block(op: &FinitePropOperator, x: usize, y: usize) -> Result<Block> {
    op.block(x, y)
}

/// `μ(R) = max_x ‖row_x restricted to d(·, x) > R‖₂` (Frobenius norm of the
/// block row strip).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiLocalityProfile {
    pub points: Vec<(f64, f64)>,
}

impl QuasiLocalityProfile {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// Smallest listed radius with `μ(R) < threshold`.
    pub fn width(&self, threshold: f64) -> Option<f64> {
        self.points.iter().find(|p| p.1 < threshold).map(|p| p.0)
    }
}

pub fn quasilocality_profile(op: &FinitePropOperator, radii: &[f64]) -> Result<QuasiLocalityProfile> {
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    let lattice = op.lattice();
    let r = op.rank();
    let dense = op.to_dense();
    let n = lattice.len();
    let mut mu = vec![0.0f64; radii.len()];
    for x in 0..n {
        // Mass of row x per distance, then tails.
        let mut shells: Vec<(f64, f64)> = (0..n)
            .map(|y| {
                let mut m = 0.0;
                for i in 0..r {
                    for j in 0..r {
                        m += dense[(x * r + i, y * r + j)].norm_sqr();
                    }
                }
                (lattice.distance(x, y), m)
            })
            .collect();
        shells.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (k, &radius) in radii.iter().enumerate() {
            let tail: f64 = shells.iter().filter(|s| s.0 > radius).map(|s| s.1).sum();
            mu[k] = mu[k].max(tail.sqrt());
        }
    }
    Ok(QuasiLocalityProfile { points: radii.iter().copied().zip(mu).collect() })
}
