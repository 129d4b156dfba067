use std::sync::Arc;

use faer::Mat;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::linalg;
use crate::models::spectral::{SpectralCache, SpectralDensity, SpectralPart, Transfer};
use crate::models::GaugeBundle;
use crate::operator::{Block, FinitePropOperator, DENSE_LIMIT};
use crate::C64;

/// Discretization of the Dirac operator.
///
/// `ForwardDifference` is the chiral stencil `A = δ_x + iδ_y` with one-sided
/// covariant differences. On a finite torus every bounded lattice stencil of
/// this type has index zero, so the flux index is carried by `WilsonOverlap`:
/// the overlap operator built from a Wilson kernel with mass `mass`, graded by
/// the pair (sign of the Wilson kernel, chirality).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DiracStencil {
    ForwardDifference,
    WilsonOverlap {
        #[serde(default = "unit_mass")]
        mass: f64,
    },
}

fn unit_mass() -> f64 {
    1.0
}

impl Default for DiracStencil {
    fn default() -> Self {
        DiracStencil::WilsonOverlap { mass: 1.0 }
    }
}

/// Graded lattice Dirac operator together with the gauge data it was built
/// from.
///
/// `kernel` is the sparse nearest-neighbour stencil: `D = [[0, A*], [A, 0]]`
/// for the chiral stencil, the shifted Wilson operator `D_W − m` for the
/// overlap. Fibers are spin-major: the first `n` components of each site are
/// the `+1` chirality.
#[derive(Clone, Debug)]
pub struct GradedOperator {
    bundle: GaugeBundle,
    stencil: DiracStencil,
    kernel: FinitePropOperator,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Landau-gauge magnetic Dirac operator with flux `φ` per plaquette.
pub fn magnetic_dirac(lattice: &Arc<Lattice>, flux: f64, stencil: DiracStencil) -> Result<GradedOperator> {
    dirac_from_bundle(GaugeBundle::uniform_flux(lattice, flux)?, stencil)
}

pub fn dirac_from_bundle(bundle: GaugeBundle, stencil: DiracStencil) -> Result<GradedOperator> {
    let lattice = bundle.lattice().clone();
    if lattice.dim() != 2 {
        return Err(Error::InvalidGeometry("the Dirac models are two-dimensional".into()));
    }
    let n = bundle.rank();
    let kernel = match stencil {
        DiracStencil::ForwardDifference => {
            let mut a: Vec<(usize, usize, Block)> = Vec::new();
            for x in 0..lattice.len() {
                a.push((x, x, Block::scalar(n, C64::new(-1.0, -1.0))));
                for (axis, coeff) in [(0, ONE), (1, I)] {
                    if let (Some(y), Some(u)) = (lattice.forward(x, axis), bundle.link(x, axis)) {
                        a.push((x, y, u.scale(coeff)));
                    }
                }
            }
            let blocks = a.into_iter().flat_map(|(x, y, b)| {
                let lower = embed(n, &b, 1, 0);
                let upper = embed(n, &b.adjoint(), 0, 1);
                [(x, y, lower), (y, x, upper)]
            });
            FinitePropOperator::from_blocks(lattice.clone(), 2 * n, blocks)?
        }
        DiracStencil::WilsonOverlap { mass } => {
            let gammas = [
                Block::from_fn(2, |i, j| if i != j { ONE } else { ZERO }),
                Block::from_fn(2, |i, j| match (i, j) {
                    (0, 1) => -I,
                    (1, 0) => I,
                    _ => ZERO,
                }),
            ];
            let half = C64::new(0.5, 0.0);
            let mut blocks = Vec::new();
            for x in 0..lattice.len() {
                blocks.push((x, x, Block::scalar(2 * n, C64::new(2.0 - mass, 0.0))));
                for axis in 0..2 {
                    if let (Some(y), Some(u)) = (lattice.forward(x, axis), bundle.link(x, axis)) {
                        let mut fwd = gammas[axis].clone();
                        fwd.sub_assign(&Block::identity(2));
                        let mut bwd = gammas[axis].clone();
                        bwd.add_assign(&Block::identity(2));
                        blocks.push((x, y, fwd.scale(half).kron(u)));
                        blocks.push((y, x, bwd.scale(-half).kron(&u.adjoint())));
                    }
                }
            }
            FinitePropOperator::from_blocks(lattice.clone(), 2 * n, blocks)?
        }
    };
    Ok(GradedOperator { bundle, stencil, kernel })
}

/// Multiplies every hop block of `D` by the matching transport of `E`
/// (tensoring fibers) and every on-site block by the identity of `E`.
pub fn twist_by_bundle(d: &GradedOperator, e: &GaugeBundle) -> Result<GradedOperator> {
    let lattice = d.kernel.lattice();
    if **lattice != **e.lattice() {
        return Err(Error::ShapeMismatch("bundle and operator live on different lattices".into()));
    }
    let id = Block::identity(e.rank());
    let mut blocks = Vec::new();
    for (x, y, b) in d.kernel.blocks() {
        let t = if x == y {
            id.clone()
        } else {
            e.hop_transport(x, y).ok_or_else(|| {
                Error::ShapeMismatch(format!("operator block ({x}, {y}) is not a hop of the bundle"))
            })?
        };
        blocks.push((x, y, b.kron(&t)));
    }
    let kernel = FinitePropOperator::from_blocks(lattice.clone(), d.kernel.rank() * e.rank(), blocks)?;
    Ok(GradedOperator { bundle: d.bundle.tensor(e)?, stencil: d.stencil, kernel })
}

/// `rank·2` block with `b` in the given quadrant of the 2×2 chirality split.
fn embed(n: usize, b: &Block, row: usize, col: usize) -> Block {
    Block::from_fn(2 * n, |i, j| {
        if i / n == row && j / n == col {
            b.get(i % n, j % n)
        } else {
            ZERO
        }
    })
}

impl GradedOperator {
    pub fn lattice(&self) -> &Arc<Lattice> {
        self.kernel.lattice()
    }

    pub fn bundle(&self) -> &GaugeBundle {
        &self.bundle
    }

    pub fn stencil(&self) -> DiracStencil {
        self.stencil
    }

    /// Rank of the gauge fiber (the spinor fiber is twice this).
    pub fn gauge_rank(&self) -> usize {
        self.bundle.rank()
    }

    /// The sparse stencil: `D` itself for the chiral stencil, `D_W − m` for the overlap.
    pub fn kernel(&self) -> &FinitePropOperator {
        &self.kernel
    }

    fn n(&self) -> usize {
        self.bundle.rank()
    }

    /// Position of `(site, component)` in the chirality-ordered basis: all
    /// `+1` components first.
    fn chiral_index(&self, x: usize, c: usize) -> usize {
        let n = self.n();
        let sites = self.lattice().len();
        if c < n {
            x * n + c
        } else {
            sites * n + x * n + (c - n)
        }
    }

    /// Dense copy of the stencil in the chirality-ordered basis.
    fn chiral_ordered(&self, gamma5_left: bool) -> Mat<C64> {
        let n = self.n();
        let dim = self.kernel.dim();
        let mut m = Mat::<C64>::zeros(dim, dim);
        for (x, y, b) in self.kernel.blocks() {
            for i in 0..2 * n {
                let sign = if gamma5_left && i >= n { -1.0 } else { 1.0 };
                for j in 0..2 * n {
                    let v = b.get(i, j);
                    if v != ZERO {
                        m[(self.chiral_index(x, i), self.chiral_index(y, j))] = v * sign;
                    }
                }
            }
        }
        m
    }

    /// Hermitian Wilson kernel `γ5 (D_W − m)` in the chirality-ordered basis.
    fn wilson_hamiltonian(&self) -> Result<Mat<C64>> {
        match self.stencil {
            DiracStencil::WilsonOverlap { .. } => Ok(self.chiral_ordered(true)),
            DiracStencil::ForwardDifference => Err(Error::UnsupportedModel("no Wilson kernel".into())),
        }
    }

    /// Eigenpairs of the Wilson kernel, refusing a closed gap (sign undefined).
    fn wilson_eigen(&self) -> Result<(Vec<f64>, Mat<C64>)> {
        let h = self.wilson_hamiltonian()?;
        let (values, u) = linalg::hermitian_eigen(h.as_ref())?;
        let gap = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        if gap < 1e-10 {
            return Err(Error::Numerical(format!("Wilson kernel gap {gap:e} too small for the sign function")));
        }
        Ok((values, u))
    }

    /// Smallest |eigenvalue| of the Wilson kernel (overlap only).
    pub fn wilson_gap(&self) -> Result<f64> {
        let h = self.wilson_hamiltonian()?;
        Ok(linalg::hermitian_eigenvalues(h.as_ref())?.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min))
    }

    /// Matrix of the chiral map whose Fredholm index is the model index.
    ///
    /// Chiral stencil: the lower-left block `A`. Overlap: the overlap operator
    /// restricted to the positive-sign eigenspace of the Wilson kernel and
    /// projected to positive chirality, i.e. the `+` rows of those eigenvectors.
    pub fn chiral_matrix(&self) -> Result<Mat<C64>> {
        let half = self.kernel.dim() / 2;
        match self.stencil {
            DiracStencil::ForwardDifference => {
                let d = self.chiral_ordered(false);
                Ok(d.as_ref().submatrix(half, 0, half, half).to_owned())
            }
            DiracStencil::WilsonOverlap { .. } => {
                let (values, u) = self.wilson_eigen()?;
                let first_pos = values.iter().position(|&v| v > 0.0).unwrap_or(values.len());
                let cols = values.len() - first_pos;
                Ok(u.as_ref().submatrix(0, first_pos, half, cols).to_owned())
            }
        }
    }

    /// `(dim ker, dim coker)` of the chiral map.
    pub fn kernel_dimensions(&self) -> Result<(usize, usize)> {
        linalg::kernel_dimensions(self.chiral_matrix()?.as_ref())
    }

    /// Fredholm index by the singular-value oracle.
    pub fn index(&self) -> Result<i64> {
        let (k, c) = self.kernel_dimensions()?;
        Ok(k as i64 - c as i64)
    }

    /// The graded self-adjoint operator whose supertrace is evaluated.
    ///
    /// For the overlap this lives on two copies of the spinor space, with
    /// per-site fiber `4n` laid out as `[copy 1 | copy 2]`, and is dense.
    pub fn operator(&self) -> Result<FinitePropOperator> {
        match self.stencil {
            DiracStencil::ForwardDifference => Ok(self.kernel.clone()),
            DiracStencil::WilsonOverlap { .. } => Ok(self.overlap_pair()?.0),
        }
    }

    /// The grading `ε` matching [`GradedOperator::operator`].
    pub fn grading(&self) -> Result<FinitePropOperator> {
        let n = self.n();
        match self.stencil {
            DiracStencil::ForwardDifference => FinitePropOperator::from_blocks(
                self.lattice().clone(),
                2 * n,
                (0..self.lattice().len())
                    .map(|x| (x, x, Block::from_fn(2 * n, |i, j| if i != j { ZERO } else if i < n { ONE } else { -ONE }))),
            ),
            DiracStencil::WilsonOverlap { .. } => Ok(self.overlap_pair()?.1),
        }
    }

    /// `(D̃, ε)` for the overlap: `D̃ = [[0, B*], [B, 0]]` with
    /// `B = P_{γ5=+1} D_ov P_{S=+1}` and `ε = diag(P_{S=+1}, −P_{γ5=+1})`.
    fn overlap_pair(&self) -> Result<(FinitePropOperator, FinitePropOperator)> {
        let n = self.n();
        let sites = self.lattice().len();
        let spin = 2 * n;
        let dim = 2 * spin * sites;
        if dim > DENSE_LIMIT {
            return Err(Error::DenseLimit { rows: dim, limit: DENSE_LIMIT });
        }
        let (values, u) = self.wilson_eigen()?;
        let us = Mat::from_fn(u.nrows(), u.ncols(), |i, k| u[(i, k)] * values[k].signum());
        let s = &us * u.adjoint();
        let half = spin * sites / 2;
        // Chirality-ordered basis: rows < half have γ5 = +1.
        let g5 = |i: usize| if i < half { 1.0 } else { -1.0 };
        let pg = Mat::from_fn(2 * half, 2 * half, |i, j| {
            let id = if i == j { ONE } else { ZERO };
            (id + s[(i, j)]) * 0.5
        });
        // D_ov = 1 + γ5 S; B = P_γ+ D_ov P_Γ, where P_γ+ keeps rows < half.
        let dov = Mat::from_fn(2 * half, 2 * half, |i, j| {
            let id = if i == j { ONE } else { ZERO };
            id + s[(i, j)] * g5(i)
        });
        let b_full = &dov * &pg;
        let b = Mat::from_fn(2 * half, 2 * half, |i, j| if i < half { b_full[(i, j)] } else { ZERO });
        // Map chirality-ordered index back to (site, component).
        let mut site_of = vec![(0usize, 0usize); 2 * half];
        for x in 0..sites {
            for c in 0..spin {
                site_of[self.chiral_index(x, c)] = (x, c);
            }
        }
        let global = |copy: usize, i: usize| {
            let (x, c) = site_of[i];
            x * 2 * spin + copy * spin + c
        };
        let mut dt = Mat::<C64>::zeros(dim, dim);
        let mut eps = Mat::<C64>::zeros(dim, dim);
        for i in 0..2 * half {
            for j in 0..2 * half {
                let v = b[(i, j)];
                dt[(global(1, i), global(0, j))] = v;
                dt[(global(0, j), global(1, i))] = v.conj();
                eps[(global(0, i), global(0, j))] = pg[(i, j)];
            }
            if i < half {
                eps[(global(1, i), global(1, i))] = -ONE;
            }
        }
        Ok((
            FinitePropOperator::from_dense(self.lattice().clone(), 2 * spin, dt)?,
            FinitePropOperator::from_dense(self.lattice().clone(), 2 * spin, eps)?,
        ))
    }

    /// Eigen-data from which `tr_s k_{f(D)}(x,x)` follows for any filter `f`
    /// at the requested sites.
    pub fn spectral_density(&self, sites: &[usize]) -> Result<SpectralDensity> {
        for &x in sites {
            self.lattice().check_site(x)?;
        }
        let n = self.n();
        match self.stencil {
            DiracStencil::ForwardDifference => {
                let d = self.kernel.to_dense();
                let (values, v) = linalg::hermitian_eigen(d.as_ref())?;
                let r = 2 * n;
                let weights = weights_by_site(sites, values.len(), |x, k| {
                    (0..r).map(|c| {
                        let a = v[(x * r + c, k)].norm_sqr();
                        if c < n {
                            a
                        } else {
                            -a
                        }
                    })
                    .sum()
                });
                Ok(SpectralDensity::new(sites.to_vec(), vec![SpectralPart::new(Transfer::Direct, values, weights)?])?)
            }
            DiracStencil::WilsonOverlap { .. } => {
                let (values, u) = self.wilson_eigen()?;
                let half = u.nrows() / 2;
                let first_pos = values.iter().position(|&v| v > 0.0).unwrap_or(values.len());
                drop(values);
                let pos_cols = u.ncols() - first_pos;
                let mut parts = Vec::with_capacity(2);
                for (row0, transfer) in [(0, Transfer::OverlapPlus), (half, Transfer::OverlapMinus)] {
                    // Chiral block of the sign function: S_cc = 2 V_c,pos V_c,pos* − 1.
                    let vpos = u.as_ref().submatrix(row0, first_pos, half, pos_cols);
                    let mut block = vpos * vpos.adjoint();
                    for j in 0..half {
                        for i in 0..half {
                            block[(i, j)] *= 2.0;
                        }
                        block[(j, j)] -= ONE;
                    }
                    let (mu, w) = linalg::hermitian_eigen(block.as_ref())?;
                    drop(block);
                    let weights = weights_by_site(sites, mu.len(), |x, k| {
                        (0..n).map(|c| w[(x * n + c, k)].norm_sqr()).sum()
                    });
                    parts.push(SpectralPart::new(transfer, mu, weights)?);
                }
                SpectralDensity::new(sites.to_vec(), parts)
            }
        }
    }

    /// Like [`GradedOperator::spectral_density`], consulting `cache` first.
    pub fn spectral_density_cached(
        &self,
        sites: &[usize],
        cache: Option<&dyn SpectralCache>,
    ) -> Result<SpectralDensity> {
        let Some(cache) = cache else {
            return self.spectral_density(sites);
        };
        let key = self.cache_key(sites);
        if let Some(hit) = cache.load(&key) {
            if hit.sites() == sites {
                return Ok(hit);
            }
        }
        let data = self.spectral_density(sites)?;
        cache.store(&key, &data)?;
        Ok(data)
    }

    /// Hex SHA-256 over the stencil, every transport, and the site list.
    pub fn cache_key(&self, sites: &[usize]) -> String {
        let mut h = Sha256::new();
        h.update(format!("{:?}|", self.stencil).as_bytes());
        h.update(self.bundle.fingerprint_text().as_bytes());
        h.update(format!("|sites{}|", sites.len()).as_bytes());
        for &s in sites {
            h.update((s as u64).to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn weights_by_site(sites: &[usize], nev: usize, w: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(sites.len() * nev);
    for &x in sites {
        for k in 0..nev {
            out.push(w(x, k));
        }
    }
    out
}
