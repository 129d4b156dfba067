use std::sync::Arc;

use faer::{Mat, MatRef};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{build_lattice, GeometrySpec, Lattice};
use crate::linalg;
use crate::C64;

/// Finite Fredholm module: sections of a rank-`rank` bundle over a lattice,
/// functions acting by multiplication, an operator `T`, and optionally a
/// grading commuting with the representation.
///
/// `trace_window`, when present, is inserted into every trace the cocycles
/// take. Finite truncations of Hardy-type modules have a second spectral
/// edge at the truncation frequency whose contribution exactly cancels the
/// physical one; the window keeps only the physical edge.
#[derive(Clone, Debug)]
pub struct FredholmModule {
    lattice: Arc<Lattice>,
    rank: usize,
    operator: Mat<C64>,
    grading: Option<Mat<C64>>,
    trace_window: Option<Mat<C64>>,
    involutive: bool,
}

impl FredholmModule {
    pub fn new(
        lattice: Arc<Lattice>,
        rank: usize,
        operator: Mat<C64>,
        grading: Option<Mat<C64>>,
        involutive: bool,
    ) -> Result<Self> {
        let dim = lattice.len() * rank;
        if operator.nrows() != dim || operator.ncols() != dim {
            return Err(Error::ShapeMismatch(format!("operator is {}x{}, space has dimension {dim}", operator.nrows(), operator.ncols())));
        }
        let module = Self { lattice, rank, operator, grading, trace_window: None, involutive };
        if involutive {
            let (sq, herm) = module.involution_defects();
            if sq > 1e-10 || herm > 1e-12 {
                return Err(Error::NotInvolutive(format!("‖T²−1‖ = {sq:e}, ‖T−T*‖ = {herm:e}")));
            }
        }
        if let Some(eps) = &module.grading {
            module.check_grading(eps.as_ref())?;
        }
        Ok(module)
    }

    fn check_grading(&self, eps: MatRef<'_, C64>) -> Result<()> {
        let dim = self.dim();
        if eps.nrows() != dim || eps.ncols() != dim {
            return Err(Error::Grading("grading has the wrong shape".into()));
        }
        let r = self.rank;
        for i in 0..dim {
            for j in 0..dim {
                if i / r != j / r && eps[(i, j)] != C64::new(0.0, 0.0) {
                    return Err(Error::Grading("grading does not commute with the representation".into()));
                }
            }
        }
        let sq = &eps * &eps;
        if linalg::max_abs_diff(sq.as_ref(), Mat::<C64>::identity(dim, dim).as_ref()) > 1e-12 {
            return Err(Error::Grading("ε² ≠ 1".into()));
        }
        let anti = &eps * &self.operator + &self.operator * &eps;
        if linalg::max_abs(anti.as_ref()) > 1e-10 {
            return Err(Error::Grading("T is not odd".into()));
        }
        Ok(())
    }

    pub fn with_trace_window(mut self, window: Mat<C64>) -> Result<Self> {
        if window.nrows() != self.dim() || window.ncols() != self.dim() {
            return Err(Error::ShapeMismatch("trace window has the wrong shape".into()));
        }
        self.trace_window = Some(window);
        Ok(self)
    }

    /// `(‖T² − 1‖_max, ‖T − T*‖_max)`.
    pub fn involution_defects(&self) -> (f64, f64) {
        let dim = self.dim();
        let sq = &self.operator * &self.operator;
        (
            linalg::max_abs_diff(sq.as_ref(), Mat::<C64>::identity(dim, dim).as_ref()),
            linalg::hermitian_deviation(self.operator.as_ref()),
        )
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.lattice.len() * self.rank
    }

    pub fn operator(&self) -> &Mat<C64> {
        &self.operator
    }

    pub fn grading(&self) -> Option<&Mat<C64>> {
        self.grading.as_ref()
    }

    pub fn trace_window(&self) -> Option<&Mat<C64>> {
        self.trace_window.as_ref()
    }

    pub fn is_involutive(&self) -> bool {
        self.involutive
    }

    /// −1 for ungraded modules, 0 for graded ones.
    pub fn multidegree(&self) -> i8 {
        if self.grading.is_some() {
            0
        } else {
            -1
        }
    }

    pub fn check_function(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.lattice.len() {
            return Err(Error::ShapeMismatch(format!("function has {} values for {} sites", f.len(), self.lattice.len())));
        }
        Ok(())
    }

    /// `[T, ρ(f)]`, formed entrywise as `T_{ij} (f(j) − f(i))`.
    pub fn commutator(&self, f: &[C64]) -> Mat<C64> {
        let r = self.rank;
        let t = &self.operator;
        Mat::from_fn(t.nrows(), t.ncols(), |i, j| t[(i, j)] * (f[j / r] - f[i / r]))
    }

    /// `tr(χ X)` with the trace window if present.
    pub fn trace(&self, x: MatRef<'_, C64>) -> C64 {
        match &self.trace_window {
            None => linalg::trace(x),
            Some(w) => {
                let n = x.nrows();
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..n {
                    for k in 0..n {
                        acc += w[(i, k)] * x[(k, i)];
                    }
                }
                acc
            }
        }
    }

    /// Graded module on `2m` sites: `ε = diag(1…1, −1…−1)`,
    /// `T = [[0, V*], [V, 0]]` with `V` a random unitary.
    pub fn random_graded<R: Rng + ?Sized>(half: usize, rng: &mut R) -> Result<Self> {
        let lattice = Arc::new(build_lattice(&GeometrySpec::window(2 * half))?);
        let v = linalg::random_unitary(half, rng);
        let t = Mat::from_fn(2 * half, 2 * half, |i, j| match (i < half, j < half) {
            (true, false) => v[(j - half, i)].conj(),
            (false, true) => v[(i - half, j)],
            _ => C64::new(0.0, 0.0),
        });
        let eps = Mat::from_fn(2 * half, 2 * half, |i, j| {
            if i != j {
                C64::new(0.0, 0.0)
            } else if i < half {
                C64::new(1.0, 0.0)
            } else {
                C64::new(-1.0, 0.0)
            }
        });
        Self::new(lattice, 1, t, Some(eps), true)
    }

    /// Ungraded module on `dim` sites: `T = U diag(±1) U*` with a random
    /// unitary `U` and balanced signs.
    pub fn random_ungraded<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<Self> {
        let lattice = Arc::new(build_lattice(&GeometrySpec::window(dim))?);
        let u = linalg::random_unitary(dim, rng);
        let us = Mat::from_fn(dim, dim, |i, k| if k % 2 == 0 { u[(i, k)] } else { -u[(i, k)] });
        let t = &us * u.adjoint();
        // Symmetrize away rounding so the involution checks are tight.
        let t = Mat::from_fn(dim, dim, |i, j| (t[(i, j)] + t[(j, i)].conj()) * 0.5);
        Self::new(lattice, 1, t, None, true)
    }
}
