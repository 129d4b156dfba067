//! Finite-propagation operators on lattice sections.

mod block;
mod lipschitz;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::linalg;
use crate::C64;

pub use block::Block;
pub use lipschitz::{lipschitz_family, summability_profile, LipschitzTestFamily, SummabilityEstimate};

/// SVD-based norms refuse operators with more rows than this.
pub const DENSE_LIMIT: usize = 4096;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug)]
enum Storage {
    Sparse(Vec<BTreeMap<usize, Block>>),
    Dense(Mat<C64>),
}

/// Operator on `ℓ²(sites) ⊗ ℂ^rank` stored as sparse block rows or as a dense
/// matrix (for filtered kernels). Propagation and coefficient bound are
/// computed once on first use.
#[derive(Clone, Debug)]
pub struct FinitePropOperator {
    lattice: Arc<Lattice>,
    rank: usize,
    storage: Storage,
    propagation: OnceLock<f64>,
    coefficient_bound: OnceLock<f64>,
}

impl FinitePropOperator {
    fn sparse(lattice: Arc<Lattice>, rank: usize, rows: Vec<BTreeMap<usize, Block>>) -> Self {
        Self {
            lattice,
            rank,
            storage: Storage::Sparse(rows),
            propagation: OnceLock::new(),
            coefficient_bound: OnceLock::new(),
        }
    }

    pub fn zeros(lattice: Arc<Lattice>, rank: usize) -> Self {
        let n = lattice.len();
        Self::sparse(lattice, rank, vec![BTreeMap::new(); n])
    }

    pub fn identity(lattice: Arc<Lattice>, rank: usize) -> Self {
        let n = lattice.len();
        let rows = (0..n).map(|x| BTreeMap::from([(x, Block::identity(rank))])).collect();
        Self::sparse(lattice, rank, rows)
    }

    /// Sums the given blocks; exact zero blocks are dropped.
    pub fn from_blocks(
        lattice: Arc<Lattice>,
        rank: usize,
        blocks: impl IntoIterator<Item = (usize, usize, Block)>,
    ) -> Result<Self> {
        let n = lattice.len();
        let mut rows: Vec<BTreeMap<usize, Block>> = vec![BTreeMap::new(); n];
        for (x, y, b) in blocks {
            lattice.check_site(x)?;
            lattice.check_site(y)?;
            if b.rank() != rank {
                return Err(Error::ShapeMismatch(format!("block rank {} != {rank}", b.rank())));
            }
            match rows[x].get_mut(&y) {
                Some(acc) => acc.add_assign(&b),
                None => {
                    rows[x].insert(y, b);
                }
            }
        }
        prune(&mut rows);
        Ok(Self::sparse(lattice, rank, rows))
    }

    pub fn from_dense(lattice: Arc<Lattice>, rank: usize, m: Mat<C64>) -> Result<Self> {
        let dim = lattice.len() * rank;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::ShapeMismatch(format!("{}x{} matrix for dimension {dim}", m.nrows(), m.ncols())));
        }
        Ok(Self {
            lattice,
            rank,
            storage: Storage::Dense(m),
            propagation: OnceLock::new(),
            coefficient_bound: OnceLock::new(),
        })
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

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn block(&self, x: usize, y: usize) -> Result<Block> {
        self.lattice.check_site(x)?;
        self.lattice.check_site(y)?;
        Ok(self.block_unchecked(x, y))
    }

    fn block_unchecked(&self, x: usize, y: usize) -> Block {
        let r = self.rank;
        match &self.storage {
            Storage::Sparse(rows) => rows[x].get(&y).cloned().unwrap_or_else(|| Block::zeros(r)),
            Storage::Dense(m) => Block::from_fn(r, |i, j| m[(x * r + i, y * r + j)]),
        }
    }

    /// Nonzero blocks in row-major site order.
    pub fn blocks(&self) -> Vec<(usize, usize, Block)> {
        match &self.storage {
            Storage::Sparse(rows) => rows
                .iter()
                .enumerate()
                .flat_map(|(x, row)| row.iter().map(move |(&y, b)| (x, y, b.clone())))
                .collect(),
            Storage::Dense(_) => {
                let n = self.lattice.len();
                let mut out = Vec::new();
                for x in 0..n {
                    for y in 0..n {
                        let b = self.block_unchecked(x, y);
                        if !b.is_zero() {
                            out.push((x, y, b));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let r = self.rank;
        match &self.storage {
            Storage::Sparse(rows) => rows[i / r].get(&(j / r)).map_or(ZERO, |b| b.get(i % r, j % r)),
            Storage::Dense(m) => m[(i, j)],
        }
    }

    pub fn to_dense(&self) -> Mat<C64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Sparse(rows) => {
                let r = self.rank;
                let mut m = Mat::<C64>::zeros(self.dim(), self.dim());
                for (x, row) in rows.iter().enumerate() {
                    for (&y, b) in row {
                        for i in 0..r {
                            for j in 0..r {
                                m[(x * r + i, y * r + j)] = b.get(i, j);
                            }
                        }
                    }
                }
                m
            }
        }
    }

    /// Borrow the dense matrix when the operator is dense-backed.
    pub fn dense_ref(&self) -> Option<MatRef<'_, C64>> {
        match &self.storage {
            Storage::Dense(m) => Some(m.as_ref()),
            Storage::Sparse(_) => None,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.lattice, &other.lattice) && *self.lattice != *other.lattice {
            return Err(Error::ShapeMismatch("operators live on different lattices".into()));
        }
        if self.rank != other.rank {
            return Err(Error::ShapeMismatch(format!("fiber ranks {} and {}", self.rank, other.rank)));
        }
        Ok(())
    }

    fn with_storage(&self, storage: Storage) -> Self {
        Self {
            lattice: self.lattice.clone(),
            rank: self.rank,
            storage,
            propagation: OnceLock::new(),
            coefficient_bound: OnceLock::new(),
        }
    }

    pub fn adjoint(&self) -> Self {
        match &self.storage {
            Storage::Dense(m) => self.with_storage(Storage::Dense(m.adjoint().to_owned())),
            Storage::Sparse(rows) => {
                let mut out: Vec<BTreeMap<usize, Block>> = vec![BTreeMap::new(); rows.len()];
                for (x, row) in rows.iter().enumerate() {
                    for (&y, b) in row {
                        out[y].insert(x, b.adjoint());
                    }
                }
                self.with_storage(Storage::Sparse(out))
            }
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                let mut rows: Vec<BTreeMap<usize, Block>> = vec![BTreeMap::new(); a.len()];
                for (x, row) in a.iter().enumerate() {
                    for (&k, axk) in row {
                        for (&y, bky) in &b[k] {
                            let p = axk.mul(bky);
                            match rows[x].get_mut(&y) {
                                Some(acc) => acc.add_assign(&p),
                                None => {
                                    rows[x].insert(y, p);
                                }
                            }
                        }
                    }
                }
                prune(&mut rows);
                Ok(self.with_storage(Storage::Sparse(rows)))
            }
            (Storage::Sparse(_), Storage::Dense(m)) => {
                Ok(self.with_storage(Storage::Dense(self.apply_mat(m.as_ref()))))
            }
            (Storage::Dense(m), Storage::Sparse(_)) => {
                // A·B = (B*·A*)*
                let t = other.adjoint().apply_mat(m.adjoint().to_owned().as_ref());
                Ok(self.with_storage(Storage::Dense(t.adjoint().to_owned())))
            }
            (Storage::Dense(a), Storage::Dense(b)) => Ok(self.with_storage(Storage::Dense(a * b))),
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.check_compatible(other)?;
        match (&self.storage, &other.storage) {
            (Storage::Sparse(a), Storage::Sparse(b)) => {
                let mut rows = a.clone();
                for (x, row) in b.iter().enumerate() {
                    for (&y, blk) in row {
                        let blk = if sign < 0.0 { blk.scale(C64::new(-1.0, 0.0)) } else { blk.clone() };
                        match rows[x].get_mut(&y) {
                            Some(acc) => acc.add_assign(&blk),
                            None => {
                                rows[x].insert(y, blk);
                            }
                        }
                    }
                }
                prune(&mut rows);
                Ok(self.with_storage(Storage::Sparse(rows)))
            }
            _ => {
                let (a, b) = (self.to_dense(), other.to_dense());
                let m = Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)] * sign);
                Ok(self.with_storage(Storage::Dense(m)))
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, z: C64) -> Self {
        match &self.storage {
            Storage::Dense(m) => {
                self.with_storage(Storage::Dense(Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * z)))
            }
            Storage::Sparse(rows) => {
                let mut rows: Vec<BTreeMap<usize, Block>> =
                    rows.iter().map(|r| r.iter().map(|(&y, b)| (y, b.scale(z))).collect()).collect();
                prune(&mut rows);
                self.with_storage(Storage::Sparse(rows))
            }
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim());
        let r = self.rank;
        match &self.storage {
            Storage::Dense(m) => (0..self.dim()).map(|i| (0..self.dim()).map(|j| m[(i, j)] * v[j]).sum()).collect(),
            Storage::Sparse(rows) => {
                let mut out = vec![ZERO; self.dim()];
                for (x, row) in rows.iter().enumerate() {
                    for (&y, b) in row {
                        for i in 0..r {
                            let mut acc = ZERO;
                            for j in 0..r {
                                acc += b.get(i, j) * v[y * r + j];
                            }
                            out[x * r + i] += acc;
                        }
                    }
                }
                out
            }
        }
    }

    /// `self · m` for a dense right-hand side.
    pub fn apply_mat(&self, m: MatRef<'_, C64>) -> Mat<C64> {
        assert_eq!(m.nrows(), self.dim());
        let r = self.rank;
        match &self.storage {
            Storage::Dense(a) => a * m,
            Storage::Sparse(rows) => {
                let mut out = Mat::<C64>::zeros(self.dim(), m.ncols());
                for c in 0..m.ncols() {
                    let col = m.col(c);
                    for (x, row) in rows.iter().enumerate() {
                        for (&y, b) in row {
                            for i in 0..r {
                                let mut acc = ZERO;
                                for j in 0..r {
                                    acc += b.get(i, j) * col[y * r + j];
                                }
                                out[(x * r + i, c)] += acc;
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Largest metric distance between sites joined by a nonzero block.
    pub fn propagation(&self) -> f64 {
        *self.propagation.get_or_init(|| {
            self.blocks().iter().map(|&(x, y, _)| self.lattice.distance(x, y)).fold(0.0, f64::max)
        })
    }

    /// Largest block operator norm.
    pub fn coefficient_bound(&self) -> f64 {
        *self.coefficient_bound.get_or_init(|| self.blocks().iter().map(|(_, _, b)| b.norm()).fold(0.0, f64::max))
    }

    fn dense_for_svd(&self) -> Result<Mat<C64>> {
        if self.dim() > DENSE_LIMIT {
            return Err(Error::DenseLimit { rows: self.dim(), limit: DENSE_LIMIT });
        }
        Ok(self.to_dense())
    }

    pub fn singular_values(&self) -> Result<Vec<f64>> {
        linalg::singular_values(self.dense_for_svd()?.as_ref())
    }

    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        schatten_norm(self, p)
    }

    /// Largest entrywise deviation from self-adjointness.
    pub fn hermitian_deviation(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => linalg::hermitian_deviation(m.as_ref()),
            Storage::Sparse(rows) => {
                let r = self.rank;
                let mut dev: f64 = 0.0;
                for (x, row) in rows.iter().enumerate() {
                    for (&y, b) in row {
                        let t = rows[y].get(&x);
                        for i in 0..r {
                            for j in 0..r {
                                let other = t.map_or(ZERO, |t| t.get(j, i).conj());
                                dev = dev.max((b.get(i, j) - other).norm());
                            }
                        }
                    }
                }
                dev
            }
        }
    }

    /// Trace of the diagonal block at `x`.
    pub fn diagonal_trace(&self, x: usize) -> C64 {
        let r = self.rank;
        (0..r).map(|i| self.entry(x * r + i, x * r + i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(self.to_dense().as_ref(), other.to_dense().as_ref())
    }

    /// Exact structural equality of stored values.
    pub fn exactly_equals(&self, other: &Self) -> bool {
        self.rank == other.rank && self.blocks() == other.blocks()
    }
}

fn prune(rows: &mut [BTreeMap<usize, Block>]) {
    for row in rows {
        row.retain(|_, b| !b.is_zero());
    }
}

/// Diagonal operator `ρ(f)` on a rank-1 bundle.
pub fn multiplication_operator(lattice: &Arc<Lattice>, f: &[C64]) -> Result<FinitePropOperator> {
    multiplication_operator_rank(lattice, f, 1)
}

/// `ρ(f) ⊗ 1` on a rank-`rank` bundle.
pub fn multiplication_operator_rank(lattice: &Arc<Lattice>, f: &[C64], rank: usize) -> Result<FinitePropOperator> {
    if f.len() != lattice.len() {
        return Err(Error::ShapeMismatch(format!("function has {} values for {} sites", f.len(), lattice.len())));
    }
    FinitePropOperator::from_blocks(
        lattice.clone(),
        rank,
        f.iter().enumerate().map(|(x, &v)| (x, x, Block::scalar(rank, v))),
    )
}

pub fn real_function(f: &[f64]) -> Vec<C64> {
    f.iter().map(|&v| C64::new(v, 0.0)).collect()
}

/// `AB − BA`.
pub fn commutator(a: &FinitePropOperator, b: &FinitePropOperator) -> Result<FinitePropOperator> {
    a.compose(b)?.sub(&b.compose(a)?)
}

pub fn propagation(a: &FinitePropOperator) -> f64 {
    a.propagation()
}

/// `(Σ σᵢ^p)^{1/p}`.
pub fn schatten_norm(a: &FinitePropOperator, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::SchattenExponent(p));
    }
    Ok(schatten_from_singular_values(&a.singular_values()?, p))
}

pub fn schatten_from_singular_values(sv: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return sv.iter().sum();
    }
    sv.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Unit shift `(Sψ)(x) = ψ(x+1)` along axis 0 (zero past a window edge).
pub fn shift_operator(lattice: &Arc<Lattice>) -> FinitePropOperator {
    let blocks = (0..lattice.len())
        .filter_map(|x| lattice.forward(x, 0).map(|y| (x, y, Block::identity(1))))
        .collect::<Vec<_>>();
    FinitePropOperator::from_blocks(lattice.clone(), 1, blocks).expect("sites are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_lattice, GeometrySpec};

    fn window(n: usize) -> Arc<Lattice> {
        Arc::new(build_lattice(&GeometrySpec::window(n)).unwrap())
    }

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    #[test]
    fn constant_one_is_identity() {
        let l = window(6);
        let one = multiplication_operator(&l, &vec![c(1.0); 6]).unwrap();
        assert!(one.exactly_equals(&FinitePropOperator::identity(l, 1)));
        assert_eq!(one.propagation(), 0.0);
        assert_eq!(one.coefficient_bound(), 1.0);
    }

    #[test]
    fn shift_commutator_with_linear_function() {
        let l = window(12);
        let s = shift_operator(&l);
        let f: Vec<C64> = (0..12).map(|x| c(x as f64)).collect();
        let k = commutator(&s, &multiplication_operator(&l, &f).unwrap()).unwrap();
        // Entries f(x+1) − f(x) = 1 on the superdiagonal.
        for (x, y, b) in k.blocks() {
            assert_eq!(y, x + 1);
            assert_eq!(b.get(0, 0), c(1.0));
        }
        assert!((k.operator_norm().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shift_squares_and_commutes_with_identity() {
        let l = window(10);
        let s = shift_operator(&l);
        assert_eq!(s.propagation(), 1.0);
        assert_eq!(s.compose(&s).unwrap().propagation(), 2.0);
        let id = FinitePropOperator::identity(l, 1);
        assert!(commutator(&s, &id).unwrap().blocks().is_empty());
        assert!(commutator(&s, &s).unwrap().blocks().is_empty());
    }

    #[test]
    fn indicator_commutator_lives_on_edges() {
        let l = window(12);
        let s = shift_operator(&l);
        let f: Vec<C64> = (0..12).map(|x| c(if x <= 4 { 1.0 } else { 0.0 })).collect();
        let k = commutator(&s, &multiplication_operator(&l, &f).unwrap()).unwrap();
        let support: Vec<(usize, usize)> = k.blocks().iter().map(|&(x, y, _)| (x, y)).collect();
        assert_eq!(support, vec![(4, 5)]);
        // On a circle the indicator has two edges.
        let circle = Arc::new(build_lattice(&GeometrySpec::circle(12)).unwrap());
        let s = shift_operator(&circle);
        let k = commutator(&s, &multiplication_operator(&circle, &f).unwrap()).unwrap();
        let support: Vec<(usize, usize)> = k.blocks().iter().map(|&(x, y, _)| (x, y)).collect();
        assert_eq!(support, vec![(4, 5), (11, 0)]);
    }

    #[test]
    fn cube_of_shift_on_circle() {
        let l = Arc::new(build_lattice(&GeometrySpec::circle(8)).unwrap());
        let s = shift_operator(&l);
        let s3 = s.compose(&s).unwrap().compose(&s).unwrap();
        assert_eq!(s3.propagation(), 3.0);
    }

    #[test]
    fn schatten_basics() {
        let l = window(5);
        let id = FinitePropOperator::identity(l.clone(), 1);
        assert!((id.schatten_norm(1.0).unwrap() - 5.0).abs() < 1e-12);
        assert!(matches!(id.schatten_norm(0.5), Err(Error::SchattenExponent(_))));
        let rank_one = FinitePropOperator::from_blocks(l, 1, [(1, 3, Block::scalar(1, c(2.5)))]).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!((rank_one.schatten_norm(p).unwrap() - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_limit_is_enforced() {
        let l = Arc::new(build_lattice(&GeometrySpec::window(5000)).unwrap());
        let id = FinitePropOperator::identity(l, 1);
        assert!(matches!(id.operator_norm(), Err(Error::DenseLimit { .. })));
    }

    #[test]
    fn mixed_storage_composition_agrees() {
        let l = window(7);
        let s = shift_operator(&l);
        let f: Vec<C64> = (0..7).map(|x| C64::new(x as f64, 0.5)).collect();
        let m = multiplication_operator(&l, &f).unwrap();
        let dense_m = FinitePropOperator::from_dense(l.clone(), 1, m.to_dense()).unwrap();
        let a = s.compose(&m).unwrap();
        let b = s.compose(&dense_m).unwrap();
        let c2 = dense_m.compose(&s).unwrap();
        let d = m.compose(&s).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
        assert!(c2.max_abs_diff(&d) < 1e-14);
    }
}
