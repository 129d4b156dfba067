//! Chern–Connes cochains of finite Fredholm modules, the Hochschild
//! coboundary and the antisymmetrization map to currents.

mod calibration;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use faer::Mat;
use itertools::Itertools;

use crate::error::{Error, Result};
use crate::models::FredholmModule;
use crate::C64;

pub use calibration::{calibrate, odd_pairing, Calibration, EvenCalibration, OddCalibration, Periodicity, CALIBRATION_SCHEMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

type Evaluator = dyn Fn(&[&[C64]]) -> C64 + Send + Sync;

/// Multilinear functional on tuples of site functions.
#[derive(Clone)]
pub struct CyclicCochain {
    arity: usize,
    sites: usize,
    parity: Parity,
    degree: usize,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for CyclicCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CyclicCochain")
            .field("arity", &self.arity)
            .field("sites", &self.sites)
            .field("parity", &self.parity)
            .field("degree", &self.degree)
            .finish_non_exhaustive()
    }
}

impl CyclicCochain {
    /// Wraps an arbitrary evaluator; multilinearity is the caller's promise.
    pub fn from_fn(
        arity: usize,
        sites: usize,
        parity: Parity,
        degree: usize,
        f: impl Fn(&[&[C64]]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        Self { arity, sites, parity, degree, evaluator: Arc::new(f) }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Summability degree `m`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn evaluate(&self, fs: &[&[C64]]) -> Result<C64> {
        if fs.len() != self.arity {
            return Err(Error::Arity { expected: self.arity, got: fs.len() });
        }
        if let Some(f) = fs.iter().find(|f| f.len() != self.sites) {
            return Err(Error::ShapeMismatch(format!("function with {} values on {} sites", f.len(), self.sites)));
        }
        Ok((self.evaluator)(fs))
    }

    /// `φ(a_n, a_0, …, a_{n−1}) − (−1)^n φ(a_0, …, a_n)`.
    pub fn cyclic_defect(&self, fs: &[&[C64]]) -> Result<C64> {
        let n = self.arity.saturating_sub(1);
        let mut rotated: Vec<&[C64]> = Vec::with_capacity(fs.len());
        if let Some((&last, rest)) = fs.split_last() {
            rotated.push(last);
            rotated.extend_from_slice(rest);
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        Ok(self.evaluate(&rotated)? - self.evaluate(fs)? * sign)
    }
}

fn product(commutators: impl IntoIterator<Item = Mat<C64>>, start: Mat<C64>) -> Mat<C64> {
    commutators.into_iter().fold(start, |acc, c| &acc * &c)
}

fn double_factorial_odd(m: usize) -> f64 {
    (1..=m).map(|k| (2 * k - 1) as f64).product()
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

fn two_pi_i_pow(m: usize) -> C64 {
    C64::new(0.0, 2.0 * PI).powi(m as i32)
}

fn require_involutive(module: &FredholmModule) -> Result<()> {
    if !module.is_involutive() {
        return Err(Error::NotInvolutive("module is not flagged involutive".into()));
    }
    let (sq, herm) = module.involution_defects();
    if sq > 1e-10 || herm > 1e-12 {
        return Err(Error::NotInvolutive(format!("‖T²−1‖ = {sq:e}, ‖T−T*‖ = {herm:e}")));
    }
    Ok(())
}

/// `ch^{0,2m}(f_0, …, f_{2m}) = ½ (2πi)^m m! tr(εT[T,f_0]⋯[T,f_{2m}])`.
pub fn even_cocycle(module: &FredholmModule, m: usize) -> Result<CyclicCochain> {
    require_involutive(module)?;
    let eps = module.grading().ok_or_else(|| Error::Grading("even cocycles need a graded module".into()))?;
    let start = eps * module.operator();
    let module = module.clone();
    let constant = two_pi_i_pow(m) * (0.5 * factorial(m));
    Ok(CyclicCochain::from_fn(2 * m + 1, module.lattice().len(), Parity::Even, m, move |fs| {
        let x = product(fs.iter().map(|f| module.commutator(f)), start.clone());
        constant * module.trace(x.as_ref())
    }))
}

/// `ch^{1,2m−1}(f_0, …, f_{2m−1}) = (2πi)^m ½ (2m−1)!! tr(T[T,f_0]⋯[T,f_{2m−1}])`.
pub fn odd_cocycle(module: &FredholmModule, m: usize) -> Result<CyclicCochain> {
    require_involutive(module)?;
    if module.grading().is_some() {
        return Err(Error::Grading("odd cocycles need an ungraded module".into()));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("odd cocycles start at m = 1".into()));
    }
    let start = module.operator().clone();
    let module = module.clone();
    let constant = two_pi_i_pow(m) * (0.5 * double_factorial_odd(m));
    Ok(CyclicCochain::from_fn(2 * m, module.lattice().len(), Parity::Odd, m, move |fs| {
        let x = product(fs.iter().map(|f| module.commutator(f)), start.clone());
        constant * module.trace(x.as_ref())
    }))
}

fn pointwise(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

/// Hochschild coboundary as a cochain of one higher arity.
pub fn coboundary(phi: &CyclicCochain) -> CyclicCochain {
    let inner = phi.clone();
    let n = phi.arity - 1;
    let parity = match phi.parity {
        Parity::Even => Parity::Odd,
        Parity::Odd => Parity::Even,
    };
    CyclicCochain::from_fn(phi.arity + 1, phi.sites, parity, phi.degree, move |a| {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=n {
            let merged = pointwise(a[j], a[j + 1]);
            let args: Vec<&[C64]> =
                a[..j].iter().copied().chain(std::iter::once(merged.as_slice())).chain(a[j + 2..].iter().copied()).collect();
            let v = (inner.evaluator)(&args);
            acc += if j % 2 == 0 { v } else { -v };
        }
        let wrap = pointwise(a[n + 1], a[0]);
        let args: Vec<&[C64]> = std::iter::once(wrap.as_slice()).chain(a[1..=n].iter().copied()).collect();
        let v = (inner.evaluator)(&args);
        acc += if (n + 1) % 2 == 0 { v } else { -v };
        acc
    })
}

/// `(bφ)(a_0, …, a_{n+1})`.
pub fn hochschild_b(phi: &CyclicCochain, a: &[&[C64]]) -> Result<C64> {
    coboundary(phi).evaluate(a)
}

/// `α(φ)(f_0 df_1 ∧ … ∧ df_p) = (1/p!) Σ_σ sgn σ · φ(f_0, f_σ(1), …, f_σ(p))`.
pub fn alpha_current(phi: &CyclicCochain, f0: &[C64], fs: &[&[C64]]) -> Result<C64> {
    let p = fs.len();
    if p > 4 {
        return Err(Error::PermutationDegree(p));
    }
    if phi.arity != p + 1 {
        return Err(Error::Arity { expected: phi.arity, got: p + 1 });
    }
    let mut acc = C64::new(0.0, 0.0);
    for perm in (0..p).permutations(p) {
        let inversions = (0..p).flat_map(|i| (i + 1..p).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
        let args: Vec<&[C64]> = std::iter::once(f0).chain(perm.iter().map(|&k| fs[k])).collect();
        let v = phi.evaluate(&args)?;
        acc += if inversions % 2 == 0 { v } else { -v };
    }
    Ok(acc / factorial(p))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::geometry::{build_lattice, GeometrySpec};
    use crate::linalg;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| C64::new(linalg::gaussian(rng), linalg::gaussian(rng))).collect()
    }

    #[test]
    fn two_by_two_even_pairing() {
        let l = Arc::new(build_lattice(&GeometrySpec::window(2)).unwrap());
        let t = Mat::from_fn(2, 2, |i, j| c(if i != j { 1.0 } else { 0.0 }));
        let eps = Mat::from_fn(2, 2, |i, j| c(if i != j { 0.0 } else if i == 0 { 1.0 } else { -1.0 }));
        let m = FredholmModule::new(l, 1, t, Some(eps), true).unwrap();
        let ch = even_cocycle(&m, 0).unwrap();
        assert_eq!(ch.evaluate(&[&[c(1.0), c(0.0)]]).unwrap(), c(1.0));
        assert_eq!(ch.evaluate(&[&[c(1.0), c(1.0)]]).unwrap(), c(0.0));
        assert!(matches!(ch.evaluate(&[]), Err(Error::Arity { expected: 1, got: 0 })));
    }

    #[test]
    fn cyclicity_and_cocycle_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = FredholmModule::random_graded(3, &mut rng).unwrap();
        let ch = even_cocycle(&m, 1).unwrap();
        let fs: Vec<Vec<C64>> = (0..4).map(|_| random_function(&mut rng, 6)).collect();
        let refs: Vec<&[C64]> = fs.iter().map(Vec::as_slice).collect();
        assert!(ch.cyclic_defect(&refs[..3]).unwrap().norm() < 1e-10);
        assert!(hochschild_b(&ch, &refs).unwrap().norm() < 1e-10);
        let u = FredholmModule::random_ungraded(6, &mut rng).unwrap();
        let odd = odd_cocycle(&u, 1).unwrap();
        assert!(odd.cyclic_defect(&refs[..2]).unwrap().norm() < 1e-10);
        assert!(hochschild_b(&odd, &refs[..3]).unwrap().norm() < 1e-10);
    }

    #[test]
    fn constants_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = FredholmModule::random_ungraded(6, &mut rng).unwrap();
        let one = vec![c(1.0); 6];
        let f = random_function(&mut rng, 6);
        let odd = odd_cocycle(&u, 1).unwrap();
        assert_eq!(odd.evaluate(&[&one, &f]).unwrap(), c(0.0));
    }

    #[test]
    fn first_coboundary_formula() {
        let phi = CyclicCochain::from_fn(1, 3, Parity::Even, 0, |a| a[0][0] * 2.0 + a[0][2]);
        let a = [c(1.0), c(2.0), c(3.0)];
        let b = [c(-1.0), c(0.5), c(4.0)];
        let want = phi.evaluate(&[&pointwise(&a, &b)]).unwrap() - phi.evaluate(&[&pointwise(&b, &a)]).unwrap();
        assert_eq!(hochschild_b(&phi, &[&a, &b]).unwrap(), want);
    }

    #[test]
    fn alpha_small_degrees() {
        let phi = CyclicCochain::from_fn(3, 2, Parity::Even, 1, |a| a[0][0] * a[1][1] * a[2][0] + a[1][0]);
        let f = [[c(1.0), c(2.0)], [c(3.0), c(-1.0)], [c(0.5), c(4.0)]];
        let direct = (phi.evaluate(&[&f[0], &f[1], &f[2]]).unwrap() - phi.evaluate(&[&f[0], &f[2], &f[1]]).unwrap()) * 0.5;
        assert_eq!(alpha_current(&phi, &f[0], &[&f[1], &f[2]]).unwrap(), direct);
        let unary = CyclicCochain::from_fn(1, 2, Parity::Even, 0, |a| a[0][1]);
        assert_eq!(alpha_current(&unary, &f[0], &[]).unwrap(), c(2.0));
        let five = CyclicCochain::from_fn(6, 2, Parity::Even, 0, |_| c(0.0));
        assert!(matches!(alpha_current(&five, &f[0], &[&f[0][..]; 5]), Err(Error::PermutationDegree(5))));
    }
}
