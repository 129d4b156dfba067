use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::operator::{schatten_from_singular_values, FinitePropOperator};
use crate::{linalg, C64};

/// Deterministic sample of `L-Lip_R`: a tent at every anchor site plus seeded
/// random 1-Lipschitz fields clipped to a tent envelope, all scaled by `L`
/// and clamped to `[-1, 1]`.
///
/// Each member is `clamp(L·s)` for a fixed 1-Lipschitz shape `s`, so while no
/// clamping occurs the family is linear in `L`.
#[derive(Clone, Debug)]
pub struct LipschitzTestFamily {
    lipschitz: f64,
    diameter: f64,
    shapes: Vec<Vec<f64>>,
    functions: Vec<Vec<f64>>,
}

pub fn lipschitz_family(
    lattice: &Arc<Lattice>,
    lipschitz: f64,
    diameter: f64,
    random_samples: usize,
    seed: u64,
) -> Result<LipschitzTestFamily> {
    if !(lipschitz > 0.0 && diameter > 0.0) {
        return Err(Error::InvalidArgument("L and R must be positive".into()));
    }
    let n = lattice.len();
    let half = diameter / 2.0;
    let tent = |a: usize| -> Vec<f64> { (0..n).map(|x| (half - lattice.distance(x, a)).max(0.0)).collect() };
    let mut shapes: Vec<Vec<f64>> = (0..n).map(tent).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random_samples {
        let anchor = rng.random_range(0..n);
        let envelope = tent(anchor);
        let support: Vec<usize> = (0..n).filter(|&x| envelope[x] > 0.0).collect();
        let k = rng.random_range(1..=4usize);
        let pins: Vec<(usize, f64)> = (0..k)
            .map(|_| (support[rng.random_range(0..support.len())], rng.random_range(-half..=half)))
            .collect();
        // McShane extension of the pinned values, then clipped by ±envelope.
        let shape = (0..n)
            .map(|x| {
                let g = pins.iter().map(|&(p, v)| v + lattice.distance(x, p)).fold(f64::INFINITY, f64::min);
                g.clamp(-envelope[x], envelope[x])
            })
            .collect();
        shapes.push(shape);
    }
    let functions = shapes.iter().map(|s| s.iter().map(|&v| (lipschitz * v).clamp(-1.0, 1.0)).collect()).collect();
    let family = LipschitzTestFamily { lipschitz, diameter, shapes, functions };
    family.verify(lattice)?;
    Ok(family)
}

impl LipschitzTestFamily {
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[Vec<f64>] {
        &self.functions
    }

    /// Same shapes at a different Lipschitz constant.
    pub fn rescaled(&self, lipschitz: f64) -> Self {
        let functions =
            self.shapes.iter().map(|s| s.iter().map(|&v| (lipschitz * v).clamp(-1.0, 1.0)).collect()).collect();
        Self { lipschitz, diameter: self.diameter, shapes: self.shapes.clone(), functions }
    }

    /// Whether any member was clamped (breaking linearity in `L`).
    pub fn is_clamped(&self) -> bool {
        self.shapes.iter().flatten().any(|&v| (self.lipschitz * v).abs() > 1.0)
    }

    /// First `k` members only.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            lipschitz: self.lipschitz,
            diameter: self.diameter,
            shapes: self.shapes[..k.min(self.len())].to_vec(),
            functions: self.functions[..k.min(self.len())].to_vec(),
        }
    }

    /// Checks `‖f‖∞ ≤ 1`, the hop Lipschitz bound (which implies the global one
    /// for a path metric) and the support diameter.
    pub fn verify(&self, lattice: &Lattice) -> Result<()> {
        let tol = 1e-12;
        for (i, f) in self.functions.iter().enumerate() {
            if f.iter().any(|v| v.abs() > 1.0 + tol) {
                return Err(Error::InvalidArgument(format!("member {i} exceeds sup bound")));
            }
            for x in 0..lattice.len() {
                for y in lattice.neighbors(x) {
                    if (f[x] - f[y]).abs() > self.lipschitz * lattice.distance(x, y) + tol {
                        return Err(Error::InvalidArgument(format!("member {i} violates the Lipschitz bound")));
                    }
                }
            }
            let support: Vec<usize> = (0..lattice.len()).filter(|&x| f[x] != 0.0).collect();
            for &a in &support {
                for &b in &support {
                    if lattice.distance(a, b) > self.diameter + tol {
                        return Err(Error::InvalidArgument(format!("member {i} support too wide")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummabilityEstimate {
    /// Largest sampled `‖[F, ρ(f)]‖_p` — a lower bound for the supremum.
    pub value: f64,
    pub samples: usize,
    pub argmax: usize,
    pub per_sample: Vec<f64>,
}

/// `max_f ‖[F, ρ(f)]‖_p` over the family. The commutator is formed entrywise:
/// `[F, ρ(f)]_{xy} = F_{xy} (f(y) − f(x))`.
pub fn summability_profile(
    f_op: &FinitePropOperator,
    p: f64,
    family: &LipschitzTestFamily,
) -> Result<SummabilityEstimate> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::SchattenExponent(p));
    }
    if f_op.dim() > super::DENSE_LIMIT {
        return Err(Error::DenseLimit { rows: f_op.dim(), limit: super::DENSE_LIMIT });
    }
    let r = f_op.rank();
    let dense = f_op.to_dense();
    let mut per_sample = Vec::with_capacity(family.len());
    for f in family.functions() {
        let k = faer::Mat::from_fn(dense.nrows(), dense.ncols(), |i, j| dense[(i, j)] * C64::new(f[j / r] - f[i / r], 0.0));
        let sv = linalg::singular_values(k.as_ref())?;
        per_sample.push(schatten_from_singular_values(&sv, p));
    }
    let (argmax, value) =
        per_sample.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(SummabilityEstimate { value, samples: family.len(), argmax, per_sample })
}
