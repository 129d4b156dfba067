//! Patchwise symbols: quantization over a colored cover, symbol-estimate and
//! ellipticity audits, and fiberwise eigenbundle splitting.
//!
//! Symbols are sampled, never symbolic. A [`SymbolField`] stores `p_i(x, ξ)`
//! for every cover member `i`, every site `x` of that member and every
//! frequency of a grid fixed by the [`SymbolRegime`].

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{ColoredCover, Lattice, PartitionOfUnity};
use crate::linalg;
use crate::operator::{Block, FinitePropOperator};
use crate::C64;

/// Largest disagreement tolerated between two patches on a shared sample.
pub const OVERLAP_TOLERANCE: f64 = 1e-12;
/// Singular values at or below this count as zero.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;
/// Relative growth of an estimate constant under grid refinement that is
/// reported as divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum SymbolRegime {
    /// `ξ_a = 2πk/n_a` on the Brillouin torus of the lattice (for assembly).
    Toroidal,
    /// `ξ ∈ h·{−steps, …, steps}^d` with `h = xi_max/steps` (for estimates).
    Asymptotic { xi_max: f64, steps: usize },
    /// Unit sphere `{|ξ| = 1}`: `±1` in one dimension, `samples` equally
    /// spaced angles in two (for splitting).
    Sphere { samples: usize },
}

impl SymbolRegime {
    fn name(&self) -> &'static str {
        match self {
            SymbolRegime::Toroidal => "toroidal",
            SymbolRegime::Asymptotic { .. } => "asymptotic",
            SymbolRegime::Sphere { .. } => "sphere",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SymbolField {
    lattice: Arc<Lattice>,
    rank: usize,
    order: f64,
    regime: SymbolRegime,
    /// Points per frequency axis; frequency index is `k₀ + shape₀·k₁`.
    shape: Vec<usize>,
    frequencies: Vec<Vec<f64>>,
    patches: Vec<Vec<usize>>,
    /// `samples[i][s·F + k]` for the `s`-th site of patch `i`, frequency `k`.
    samples: Vec<Vec<Block>>,
}

fn frequency_grid(lattice: &Lattice, regime: SymbolRegime) -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
    let d = lattice.dim();
    let (shape, axis): (Vec<usize>, Vec<Vec<f64>>) = match regime {
        SymbolRegime::Toroidal => {
            let axis = lattice.extent().iter().map(|&n| (0..n).map(|k| TAU * k as f64 / n as f64).collect()).collect();
            (lattice.extent().to_vec(), axis)
        }
        SymbolRegime::Asymptotic { xi_max, steps } => {
            if steps < 2 || !(xi_max > 0.0) || !xi_max.is_finite() {
                return Err(Error::InvalidArgument(format!("asymptotic grid needs steps >= 2 and xi_max > 0 (got {steps}, {xi_max})")));
            }
            let h = xi_max / steps as f64;
            let line: Vec<f64> = (-(steps as i64)..=steps as i64).map(|k| k as f64 * h).collect();
            (vec![line.len(); d], vec![line; d])
        }
        SymbolRegime::Sphere { samples } => {
            let points: Vec<Vec<f64>> = if d == 1 {
                vec![vec![-1.0], vec![1.0]]
            } else {
                if samples < 3 {
                    return Err(Error::InvalidArgument(format!("{samples} sphere samples; need at least 3")));
                }
                (0..samples).map(|k| TAU * k as f64 / samples as f64).map(|t| vec![t.cos(), t.sin()]).collect()
            };
            return Ok((vec![points.len()], points));
        }
    };
    let mut freqs = Vec::new();
    if d == 1 {
        freqs.extend(axis[0].iter().map(|&a| vec![a]));
    } else {
        for &b in &axis[1] {
            for &a in &axis[0] {
                freqs.push(vec![a, b]);
            }
        }
    }
    Ok((shape, freqs))
}

impl SymbolField {
    /// Samples patch descriptors `p(i, x, ξ)`; `x` is in physical coordinates.
    /// Patches must agree wherever they overlap.
    pub fn from_patches(
        cover: &ColoredCover,
        rank: usize,
        order: f64,
        regime: SymbolRegime,
        p: impl Fn(usize, &[f64], &[f64]) -> Block,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidArgument("symbol rank must be positive".into()));
        }
        let lattice = cover.lattice().clone();
        let (shape, frequencies) = frequency_grid(&lattice, regime)?;
        let patches: Vec<Vec<usize>> = cover.members().to_vec();
        let mut samples = Vec::with_capacity(patches.len());
        let mut first: Vec<Option<(usize, usize)>> = vec![None; lattice.len()];
        for (i, members) in patches.iter().enumerate() {
            let mut values = Vec::with_capacity(members.len() * frequencies.len());
            for (s, &x) in members.iter().enumerate() {
                let xc = site_coordinates(&lattice, x);
                for xi in &frequencies {
                    let b = p(i, &xc, xi);
                    if b.rank() != rank {
                        return Err(Error::ShapeMismatch(format!("patch {i} returned a rank-{} block, expected {rank}", b.rank())));
                    }
                    values.push(b);
                }
                if let Some((j, t)) = first[x] {
                    let nf = frequencies.len();
                    let theirs: &Vec<Block> = &samples[j];
                    for k in 0..nf {
                        let gap = theirs[t * nf + k].max_abs_diff(&values[s * nf + k]);
                        if gap > OVERLAP_TOLERANCE {
                            return Err(Error::InvalidArgument(format!(
                                "patches {j} and {i} disagree by {gap:e} at site {x}, xi = {:?}",
                                frequencies[k]
                            )));
                        }
                    }
                } else {
                    first[x] = Some((i, s));
                }
            }
            samples.push(values);
        }
        Ok(Self { lattice, rank, order, regime, shape, frequencies, patches, samples })
    }

    /// Samples a single global descriptor `p(x, ξ)` on every patch.
    pub fn from_fn(
        cover: &ColoredCover,
        rank: usize,
        order: f64,
        regime: SymbolRegime,
        p: impl Fn(&[f64], &[f64]) -> Block,
    ) -> Result<Self> {
        Self::from_patches(cover, rank, order, regime, |_, x, xi| p(x, xi))
    }

    /// Scalar convenience wrapper around [`SymbolField::from_fn`].
    pub fn scalar(
        cover: &ColoredCover,
        order: f64,
        regime: SymbolRegime,
        p: impl Fn(&[f64], &[f64]) -> C64,
    ) -> Result<Self> {
        Self::from_fn(cover, 1, order, regime, |x, xi| Block::scalar(1, p(x, xi)))
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn regime(&self) -> SymbolRegime {
        self.regime
    }

    pub fn frequencies(&self) -> &[Vec<f64>] {
        &self.frequencies
    }

    pub fn patch_count(&self) -> usize {
        self.patches.len()
    }

    pub fn patch_sites(&self, patch: usize) -> &[usize] {
        &self.patches[patch]
    }

    /// `p_i(x, ξ_k)` for the `s`-th site of patch `i`.
    pub fn sample(&self, patch: usize, s: usize, k: usize) -> &Block {
        &self.samples[patch][s * self.frequencies.len() + k]
    }

    /// Pointwise adjoint `p*`.
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for values in &mut out.samples {
            for b in values.iter_mut() {
                *b = b.adjoint();
            }
        }
        out
    }

    fn require(&self, wanted: &str) -> Result<()> {
        if self.regime.name() != wanted {
            return Err(Error::SymbolRegime(format!("{wanted} symbol required, got {}", self.regime.name())));
        }
        Ok(())
    }

    /// Neighbouring frequency index along `axis`, if it is on the grid.
    fn frequency_step(&self, k: usize, axis: usize, delta: i64) -> Option<usize> {
        let mut idx = [k % self.shape[0], if self.shape.len() > 1 { k / self.shape[0] } else { 0 }];
        let moved = idx[axis] as i64 + delta;
        if moved < 0 || moved >= self.shape[axis] as i64 {
            return None;
        }
        idx[axis] = moved as usize;
        Some(idx[0] + self.shape[0] * idx[1])
    }
}

fn site_coordinates(lattice: &Lattice, x: usize) -> Vec<f64> {
    let c = lattice.coords(x);
    (0..lattice.dim()).map(|a| c[a] as f64 * lattice.spacing()).collect()
}

fn euclidean(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `P = Σ_i ρ(φ_i) Op_i(p_i) χ_i` with the left quantization
/// `Op_i(p)(x, y) = |Ξ|⁻¹ Σ_ξ e^{iξ·(x−y)} p(x, ξ)` and `χ_i` the indicator of
/// member `i` dilated by the cover radius. The smoothing remainder is taken
/// to be zero, so for trigonometric-polynomial symbols of bandwidth up to the
/// cover radius the result is the exact multiplier.
pub fn assemble_updo(symbol: &SymbolField, cover: &ColoredCover, pou: &PartitionOfUnity) -> Result<FinitePropOperator> {
    symbol.require("toroidal")?;
    let lattice = symbol.lattice();
    if **cover.lattice() != **lattice {
        return Err(Error::ShapeMismatch("symbol and cover live on different lattices".into()));
    }
    if cover.members() != symbol.patches.as_slice() || pou.weights().len() != cover.members().len() {
        return Err(Error::ShapeMismatch("symbol patches, cover members and partition of unity differ".into()));
    }
    let extent = lattice.extent().to_vec();
    let roots: Vec<Vec<C64>> =
        extent.iter().map(|&n| (0..n).map(|m| C64::cis(TAU * m as f64 / n as f64)).collect()).collect();
    let reach = (cover.radius() / lattice.spacing() + 1e-12).floor() as usize;
    let nf = symbol.frequencies.len();
    let norm = 1.0 / nf as f64;
    let rank = symbol.rank;
    let mut blocks: Vec<(usize, usize, Block)> = Vec::new();
    for (i, members) in symbol.patches.iter().enumerate() {
        let weight = pou.weight(i);
        let dist = lattice.chebyshev_distances_from(members);
        let halo: Vec<usize> = (0..lattice.len()).filter(|&y| dist[y] <= reach).collect();
        for (s, &x) in members.iter().enumerate() {
            if weight[x] == 0.0 {
                continue;
            }
            let cx = lattice.coords(x);
            for &y in &halo {
                let cy = lattice.coords(y);
                let mut b = Block::zeros(rank);
                for k in 0..nf {
                    let kk = [k % extent[0], if extent.len() > 1 { k / extent[0] } else { 0 }];
                    let mut phase = C64::new(1.0, 0.0);
                    for a in 0..extent.len() {
                        let delta = (cx[a] as i64 - cy[a] as i64).rem_euclid(extent[a] as i64) as usize;
                        phase *= roots[a][(kk[a] * delta) % extent[a]];
                    }
                    b.add_assign(&symbol.sample(i, s, k).scale(phase));
                }
                blocks.push((x, y, b.scale(C64::new(weight[x] * norm, 0.0))));
            }
        }
    }
    FinitePropOperator::from_blocks(lattice.clone(), rank, blocks)
}

/// Global Fourier multiplier `|Ξ|⁻¹ Σ_ξ e^{iξ·(x−y)} p(ξ)` on a periodic
/// lattice, the reference for assembled multiplier symbols.
pub fn fourier_multiplier(lattice: &Arc<Lattice>, rank: usize, p: impl Fn(&[f64]) -> Block) -> Result<FinitePropOperator> {
    if !lattice.is_periodic() {
        return Err(Error::InvalidArgument("Fourier multipliers need a periodic lattice".into()));
    }
    let (_, freqs) = frequency_grid(lattice, SymbolRegime::Toroidal)?;
    let values: Vec<Block> = freqs.iter().map(|xi| p(xi)).collect();
    let n = lattice.len();
    let mut blocks = Vec::with_capacity(n * n);
    for x in 0..n {
        let cx = lattice.coords(x);
        for y in 0..n {
            let cy = lattice.coords(y);
            let mut b = Block::zeros(rank);
            for (xi, v) in freqs.iter().zip(&values) {
                let arg: f64 = (0..lattice.dim()).map(|a| xi[a] * (cx[a] as f64 - cy[a] as f64)).sum();
                b.add_assign(&v.scale(C64::cis(arg)));
            }
            blocks.push((x, y, b.scale(C64::new(1.0 / freqs.len() as f64, 0.0))));
        }
    }
    FinitePropOperator::from_blocks(lattice.clone(), rank, blocks)
}

/// Centered difference of order `n` with unit step: first differences
/// `(f₊ − f₋)/2` and second differences `f₊ − 2f + f₋`, composed.
fn centered_stencil(n: usize) -> Vec<(i64, f64)> {
    let mut w: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
    let apply = |w: &mut BTreeMap<i64, f64>, taps: &[(i64, f64)]| {
        let mut out = BTreeMap::new();
        for (&o, &c) in w.iter() {
            for &(t, d) in taps {
                *out.entry(o + t).or_insert(0.0) += c * d;
            }
        }
        out.retain(|_, c: &mut f64| *c != 0.0);
        *w = out;
    };
    for _ in 0..n / 2 {
        apply(&mut w, &[(-1, 1.0), (0, -2.0), (1, 1.0)]);
    }
    if n % 2 == 1 {
        apply(&mut w, &[(-1, -0.5), (1, 0.5)]);
    }
    w.into_iter().collect()
}

fn multi_indices(dim: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=max {
        if dim == 1 {
            out.push(vec![total]);
        } else {
            for a in (0..=total).rev() {
                out.push(vec![a, total - a]);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateEntry {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    /// Grid maximum of `‖D^α_x D^β_ξ p‖ / (1+|ξ|)^{k−|β|}` over all patches.
    pub constant: f64,
    /// Same maximum over frequencies with `|ξ|∞ ≤ Ξ_max/2`.
    pub half_grid: f64,
    pub divergent: bool,
    /// Where the maximum is attained.
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymbolEstimate {
    pub order: f64,
    pub xi_max: f64,
    pub entries: Vec<EstimateEntry>,
}

impl SymbolEstimate {
    pub fn constant(&self, alpha: &[usize], beta: &[usize]) -> Option<f64> {
        self.entries.iter().find(|e| e.alpha == alpha && e.beta == beta).map(|e| e.constant)
    }

    pub fn divergent(&self) -> bool {
        self.entries.iter().any(|e| e.divergent)
    }
}

/// Symbol-estimate constants for all `|α| ≤ max_alpha`, `|β| ≤ max_beta`
/// (both at most 3) by centered differences with one-cell steps. Points whose
/// stencil leaves the patch or the frequency grid are skipped.
pub fn symbol_estimate(symbol: &SymbolField, max_alpha: usize, max_beta: usize) -> Result<SymbolEstimate> {
    symbol.require("asymptotic")?;
    if max_alpha > 3 || max_beta > 3 {
        return Err(Error::InvalidArgument(format!("derivative orders ({max_alpha}, {max_beta}) exceed 3")));
    }
    let SymbolRegime::Asymptotic { xi_max, steps } = symbol.regime else { unreachable!() };
    let h_xi = xi_max / steps as f64;
    let h_x = symbol.lattice.spacing();
    let lattice = &symbol.lattice;
    let d = lattice.dim();
    let nf = symbol.frequencies.len();
    let mut entries = Vec::new();
    for alpha in multi_indices(d, max_alpha) {
        for beta in multi_indices(d, max_beta) {
            let x_taps = product_stencil(&alpha);
            let xi_taps = product_stencil(&beta);
            let scale = h_x.powi(-(alpha.iter().sum::<usize>() as i32)) * h_xi.powi(-(beta.iter().sum::<usize>() as i32));
            let weight_order = symbol.order - beta.iter().sum::<usize>() as f64;
            let (mut best, mut half, mut at) = (0.0f64, 0.0f64, (Vec::new(), Vec::new()));
            for (i, members) in symbol.patches.iter().enumerate() {
                let mut position = vec![usize::MAX; lattice.len()];
                for (s, &x) in members.iter().enumerate() {
                    position[x] = s;
                }
                for &x in members {
                    let c = lattice.coords(x);
                    // Shifted sites must stay inside the patch without wrapping.
                    let shifted: Option<Vec<(usize, f64)>> = x_taps
                        .iter()
                        .map(|(o, w)| {
                            let (px, py) = (c[0] as i64 + o[0], c[1] as i64 + o.get(1).copied().unwrap_or(0));
                            let inside = px >= 0
                                && (px as usize) < lattice.extent()[0]
                                && (d == 1 || (py >= 0 && (py as usize) < lattice.extent()[1]));
                            if !inside {
                                return None;
                            }
                            let y = lattice.site_at(px, py)?;
                            (position[y] != usize::MAX).then_some((position[y], *w))
                        })
                        .collect();
                    let Some(shifted) = shifted else { continue };
                    for k in 0..nf {
                        let moved: Option<Vec<(usize, f64)>> = xi_taps
                            .iter()
                            .map(|(o, w)| {
                                let mut kk = Some(k);
                                for (a, &oa) in o.iter().enumerate() {
                                    kk = kk.and_then(|v| symbol.frequency_step(v, a, oa));
                                }
                                kk.map(|v| (v, *w))
                            })
                            .collect();
                        let Some(moved) = moved else { continue };
                        let mut acc = Block::zeros(symbol.rank);
                        for &(t, wx) in &shifted {
                            for &(q, wq) in &moved {
                                acc.add_assign(&symbol.sample(i, t, q).scale(C64::new(wx * wq, 0.0)));
                            }
                        }
                        let xi = &symbol.frequencies[k];
                        let value = acc.norm() * scale / (1.0 + euclidean(xi)).powf(weight_order);
                        if value > best {
                            best = value;
                            at = (site_coordinates(lattice, x), xi.clone());
                        }
                        if xi.iter().all(|v| v.abs() <= xi_max / 2.0 + 1e-12 * xi_max) {
                            half = half.max(value);
                        }
                    }
                }
            }
            let divergent = if half > 0.0 { best > (1.0 + DIVERGENCE_THRESHOLD) * half } else { best > 0.0 };
            entries.push(EstimateEntry { alpha: alpha.clone(), beta, constant: best, half_grid: half, divergent, x: at.0, xi: at.1 });
        }
    }
    Ok(SymbolEstimate { order: symbol.order, xi_max, entries })
}

/// Tensor product of one-dimensional centered stencils; offsets per axis.
fn product_stencil(orders: &[usize]) -> Vec<(Vec<i64>, f64)> {
    let mut out: Vec<(Vec<i64>, f64)> = vec![(Vec::new(), 1.0)];
    for &n in orders {
        let taps = centered_stencil(n);
        out = out
            .iter()
            .flat_map(|(o, w)| {
                taps.iter().map(move |&(t, c)| {
                    let mut o = o.clone();
                    o.push(t);
                    (o, w * c)
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipticityWitness {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    /// Smallest singular value at a grid point, or 0 for a zero located
    /// between two grid points.
    pub smallest_singular_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EllipticityReport {
    pub elliptic: bool,
    /// `sup ‖p⁻¹‖ (1+|ξ|)^k` over the checked points (up to the first failure).
    pub inverse_constant: f64,
    pub points_checked: usize,
    pub witness: Option<EllipticityWitness>,
}

/// Invertibility of `p(x, ξ)` on all grid points with `|ξ| > R`, plus a scan
/// for zeros of `det p` between neighbouring frequencies (a sign change of a
/// real scalar symbol, say). Requires `R < Ξ_max/2`.
pub fn ellipticity_check(symbol: &SymbolField, r: f64) -> Result<EllipticityReport> {
    symbol.require("asymptotic")?;
    let SymbolRegime::Asymptotic { xi_max, .. } = symbol.regime else { unreachable!() };
    if !(r >= 0.0 && r < xi_max / 2.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must lie in [0, Xi_max/2 = {})", xi_max / 2.0)));
    }
    let nf = symbol.frequencies.len();
    let outside: Vec<bool> = symbol.frequencies.iter().map(|xi| euclidean(xi) > r).collect();
    let mut report = EllipticityReport { elliptic: true, inverse_constant: 0.0, points_checked: 0, witness: None };
    for (i, members) in symbol.patches.iter().enumerate() {
        for (s, &x) in members.iter().enumerate() {
            let mut dets = vec![C64::new(0.0, 0.0); nf];
            for k in (0..nf).filter(|&k| outside[k]) {
                let b = symbol.sample(i, s, k);
                let m = b.to_mat();
                let sv = linalg::singular_values(m.as_ref())?;
                let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
                report.points_checked += 1;
                if !(smallest > SINGULAR_THRESHOLD) {
                    report.elliptic = false;
                    report.witness = Some(EllipticityWitness {
                        x: site_coordinates(&symbol.lattice, x),
                        xi: symbol.frequencies[k].clone(),
                        smallest_singular_value: smallest,
                    });
                    return Ok(report);
                }
                let xi = &symbol.frequencies[k];
                report.inverse_constant = report.inverse_constant.max((1.0 + euclidean(xi)).powf(symbol.order) / smallest);
                dets[k] = determinant(&m);
            }
            for k in (0..nf).filter(|&k| outside[k]) {
                for axis in 0..symbol.shape.len() {
                    let Some(q) = symbol.frequency_step(k, axis, 1) else { continue };
                    if !outside[q] {
                        continue;
                    }
                    if let Some(t) = segment_zero(dets[k], dets[q]) {
                        let (a, b) = (&symbol.frequencies[k], &symbol.frequencies[q]);
                        report.elliptic = false;
                        report.witness = Some(EllipticityWitness {
                            x: site_coordinates(&symbol.lattice, x),
                            xi: a.iter().zip(b).map(|(u, v)| u + t * (v - u)).collect(),
                            smallest_singular_value: 0.0,
                        });
                        return Ok(report);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn determinant(m: &faer::Mat<C64>) -> C64 {
    match m.nrows() {
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.determinant(),
    }
}

/// Parameter `t ∈ [0, 1]` where the segment from `a` to `b` passes through 0,
/// if it does (to rounding).
fn segment_zero(a: C64, b: C64) -> Option<f64> {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return None;
    }
    let t = -(a.re * d.re + a.im * d.im) / len2;
    if !(0.0..=1.0).contains(&t) {
        return None;
    }
    let miss = (a + d * t).norm();
    (miss <= 1e-12 * a.norm().max(b.norm())).then_some(t)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitFiber {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub rank_plus: usize,
    pub rank_minus: usize,
    /// Spectral projector onto the positive eigenspace.
    #[serde(skip)]
    pub projector: Block,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolSplitting {
    pub fibers: Vec<SplitFiber>,
    /// Ranks agree along every connected component of the sampled sphere
    /// bundle (two antipodal points per site in one dimension, a circle in two).
    pub constant_on_components: bool,
}

/// Eigenbundle splitting `E⁺ ⊕ E⁻` of a hermitian symbol on the sphere
/// bundle; any eigenvalue within `tol` of zero is an error.
pub fn symbol_splitting(symbol: &SymbolField, tol: f64) -> Result<SymbolSplitting> {
    symbol.require("sphere")?;
    let nf = symbol.frequencies.len();
    let mut fibers = Vec::new();
    let mut constant_on_components = true;
    // Component label of each sphere sample: the sign in one dimension.
    let component = |k: usize| if symbol.lattice.dim() == 1 { usize::from(symbol.frequencies[k][0] > 0.0) } else { 0 };
    let mut seen: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); symbol.patches.len()];
    for (i, members) in symbol.patches.iter().enumerate() {
        for (s, &x) in members.iter().enumerate() {
            for k in 0..nf {
                let m = symbol.sample(i, s, k).to_mat();
                let dev = linalg::hermitian_deviation(m.as_ref());
                if dev > 1e-10 {
                    return Err(Error::InvalidArgument(format!("fiber at site {x} is not hermitian (deviation {dev:e})")));
                }
                let (values, vectors) = linalg::hermitian_eigen(m.as_ref())?;
                let xc = site_coordinates(&symbol.lattice, x);
                if let Some(&v) = values.iter().find(|v| v.abs() <= tol) {
                    return Err(Error::NearZeroEigenvalue { x: xc, xi: symbol.frequencies[k].clone(), value: v });
                }
                let rank = symbol.rank;
                let positive: Vec<usize> = (0..rank).filter(|&j| values[j] > 0.0).collect();
                let projector = Block::from_fn(rank, |a, b| {
                    positive.iter().map(|&j| vectors[(a, j)] * vectors[(b, j)].conj()).sum()
                });
                let rank_plus = positive.len();
                if *seen[i].entry(component(k)).or_insert(rank_plus) != rank_plus {
                    constant_on_components = false;
                }
                fibers.push(SplitFiber { x: xc, xi: symbol.frequencies[k].clone(), rank_plus, rank_minus: rank - rank_plus, projector });
            }
        }
    }
    Ok(SymbolSplitting { fibers, constant_on_components })
}
