//! Dense helpers on top of faer. Everything here works on `Mat<c64>`.

use faer::{Mat, MatRef, Side};
use rand::Rng;

use crate::error::{Error, Result};
use crate::C64;

/// Singular values below this count as zero when measuring kernels.
pub const KERNEL_THRESHOLD: f64 = 1e-10;

pub fn hermitian_eigen(a: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigendecomposition: {e:?}")))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn hermitian_eigenvalues(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigenvalues: {e:?}")))
}

/// Nonincreasing singular values.
pub fn singular_values(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values()
        .map_err(|e| Error::Numerical(format!("singular values: {e:?}")))
}

pub fn operator_norm(a: MatRef<'_, C64>) -> Result<f64> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn frobenius_norm(a: MatRef<'_, C64>) -> f64 {
    a.norm_l2()
}

pub fn max_abs(a: MatRef<'_, C64>) -> f64 {
    a.norm_max()
}

/// `(dim ker, dim coker)` of a rectangular matrix, singular values below
/// [`KERNEL_THRESHOLD`] counting as zero.
pub fn kernel_dimensions(a: MatRef<'_, C64>) -> Result<(usize, usize)> {
    let sv = singular_values(a)?;
    let rank = sv.iter().filter(|&&s| s >= KERNEL_THRESHOLD).count();
    Ok((a.ncols() - rank, a.nrows() - rank))
}

pub fn fredholm_index(a: MatRef<'_, C64>) -> Result<i64> {
    let (k, c) = kernel_dimensions(a)?;
    Ok(k as i64 - c as i64)
}

pub fn hermitian_deviation(a: MatRef<'_, C64>) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `U f(Λ) U*` for a Hermitian matrix.
pub fn hermitian_function(a: MatRef<'_, C64>, f: impl Fn(f64) -> f64) -> Result<Mat<C64>> {
    let (values, u) = hermitian_eigen(a)?;
    let fu = Mat::from_fn(u.nrows(), u.ncols(), |i, k| u[(i, k)] * f(values[k]));
    Ok(&fu * u.adjoint())
}

pub fn kron(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Mat<C64> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn trace(a: MatRef<'_, C64>) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Haar-ish random unitary from the QR factor of a complex Gaussian matrix,
/// with the phases of `R`'s diagonal folded back in.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<C64> {
    let g = Mat::from_fn(n, n, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    Mat::from_fn(n, n, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Box–Muller; keeps the core crate free of a distributions dependency.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn max_abs_diff(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}
