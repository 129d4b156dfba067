//! Per-volume traces along Følner sequences.
//!
//! The ultrafilter functional is replaced by a Cauchy-tail estimator: a limit
//! is reported only when the last `window` values agree to `tolerance`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::{apply_filter, FilterFunction, FilterMethod};
use crate::geometry::FolnerSequence;
use crate::models::{GradedOperator, SpectralCache};
use crate::operator::FinitePropOperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitPolicy {
    pub window: usize,
    pub tolerance: f64,
}

impl Default for LimitPolicy {
    fn default() -> Self {
        Self { window: 2, tolerance: 1e-2 }
    }
}

impl LimitPolicy {
    pub fn new(window: usize, tolerance: f64) -> Result<Self> {
        let p = Self { window, tolerance };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 2 {
            return Err(Error::InvalidPolicy(format!("window {} must be at least 2", self.window)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidPolicy(format!("tolerance {} must be positive", self.tolerance)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Limit {
    Converged { value: f64, spread: f64 },
    Exact { value: f64 },
    Divergent { spread: f64, tail: Vec<f64> },
}

impl Limit {
    pub fn value(&self) -> Option<f64> {
        match self {
            Limit::Converged { value, .. } | Limit::Exact { value } => Some(*value),
            Limit::Divergent { .. } => None,
        }
    }

    pub fn spread(&self) -> f64 {
        match self {
            Limit::Converged { spread, .. } | Limit::Divergent { spread, .. } => *spread,
            Limit::Exact { .. } => 0.0,
        }
    }
}

pub fn limit_functional(sequence: &[f64], policy: LimitPolicy) -> Result<Limit> {
    policy.validate()?;
    if sequence.len() < policy.window {
        return Err(Error::SequenceTooShort { len: sequence.len(), window: policy.window });
    }
    let tail = &sequence[sequence.len() - policy.window..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hi - lo;
    if spread <= policy.tolerance {
        let value = tail.iter().sum::<f64>() / tail.len() as f64;
        Ok(Limit::Converged { value, spread })
    } else {
        Ok(Limit::Divergent { spread, tail: tail.to_vec() })
    }
}

/// Per-set values along a Følner sequence and their limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEstimate {
    pub values: Vec<f64>,
    /// Largest |imaginary part| of the per-set values (diagnostic).
    pub imaginary: f64,
    pub limit: Limit,
    /// Deficiency of the last set at the sequence's first tabulated radius.
    pub last_deficiency: Option<f64>,
}

impl TraceEstimate {
    pub(crate) fn from_values(values: Vec<f64>, imaginary: f64, folner: &FolnerSequence, policy: LimitPolicy) -> Result<Self> {
        let limit = if folner.is_exhaustive() && values.len() == 1 {
            Limit::Exact { value: values[0] }
        } else {
            limit_functional(&values, policy)?
        };
        let last_deficiency = match folner.radii().first() {
            Some(&r) => Some(folner.deficiency(folner.len() - 1, r)?),
            None if folner.is_exhaustive() => Some(0.0),
            None => None,
        };
        Ok(Self { values, imaginary, limit, last_deficiency })
    }

    pub fn value(&self) -> Option<f64> {
        self.limit.value()
    }
}

/// `θ_i(T) = (1/#Γ_i) Σ_{γ∈Γ_i} tr T(γ,γ)` for every set.
pub fn folner_averages(t: &FinitePropOperator, folner: &FolnerSequence) -> Result<Vec<crate::C64>> {
    if **t.lattice() != **folner.lattice() {
        return Err(Error::ShapeMismatch("operator and Følner sequence live on different lattices".into()));
    }
    Ok(folner
        .sets()
        .iter()
        .map(|set| set.iter().map(|&x| t.diagonal_trace(x)).sum::<crate::C64>() / set.len() as f64)
        .collect())
}

pub fn roe_trace(t: &FinitePropOperator, folner: &FolnerSequence, policy: LimitPolicy) -> Result<TraceEstimate> {
    let avg = folner_averages(t, folner)?;
    let imaginary = avg.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    TraceEstimate::from_values(avg.iter().map(|z| z.re).collect(), imaginary, folner, policy)
}

/// Supertrace density `tr_s k_{f(D)}(x,x)` averaged over every Følner set,
/// from the spectral data of the model (optionally cached).
pub fn analytic_index_density(
    d: &GradedOperator,
    f: &FilterFunction,
    folner: &FolnerSequence,
    policy: LimitPolicy,
    cache: Option<&dyn SpectralCache>,
) -> Result<TraceEstimate> {
    f.check_index_admissible()?;
    if **d.lattice() != **folner.lattice() {
        return Err(Error::ShapeMismatch("model and Følner sequence live on different lattices".into()));
    }
    let mut sites: Vec<usize> = folner.sets().iter().flatten().copied().collect();
    sites.sort_unstable();
    sites.dedup();
    let data = d.spectral_density_cached(&sites, cache)?;
    let dens = data.density(&|x| f.eval(x));
    let mut at = vec![usize::MAX; d.lattice().len()];
    for (k, &s) in sites.iter().enumerate() {
        at[s] = k;
    }
    let values = folner.sets().iter().map(|set| set.iter().map(|&x| dens[at[x]]).sum::<f64>() / set.len() as f64).collect();
    TraceEstimate::from_values(values, 0.0, folner, policy)
}

/// Per-site `tr(ε k(x,x))` for a materialized filter kernel.
pub fn graded_site_density(kernel: &FinitePropOperator, grading: &FinitePropOperator) -> Result<Vec<f64>> {
    let prod = grading.compose(kernel)?;
    Ok((0..kernel.lattice().len()).map(|x| prod.diagonal_trace(x).re).collect())
}

/// Same density through an explicit filter of the model's graded operator;
/// slower, but independent of the spectral shortcut.
pub fn analytic_index_density_direct(
    d: &GradedOperator,
    f: &FilterFunction,
    method: FilterMethod,
    folner: &FolnerSequence,
    policy: LimitPolicy,
) -> Result<TraceEstimate> {
    f.check_index_admissible()?;
    let k = apply_filter(&d.operator()?, f, method)?;
    let dens = graded_site_density(&k.operator, &d.grading()?)?;
    let values = folner.sets().iter().map(|set| set.iter().map(|&x| dens[x]).sum::<f64>() / set.len() as f64).collect();
    TraceEstimate::from_values(values, 0.0, folner, policy)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;
    use std::sync::Arc;

    use super::*;
    use crate::geometry::{build_lattice, folner_boxes, GeometrySpec};
    use crate::models::{magnetic_dirac, DiracStencil};
    use crate::operator::shift_operator;

    fn policy() -> LimitPolicy {
        LimitPolicy::new(3, 0.5).unwrap()
    }

    #[test]
    fn limits_of_simple_sequences() {
        assert_eq!(limit_functional(&[2.0; 5], policy()).unwrap(), Limit::Converged { value: 2.0, spread: 0.0 });
        let harmonic: Vec<f64> = (1..=10).map(|i| 1.0 / i as f64).collect();
        let l = limit_functional(&harmonic, policy()).unwrap();
        assert!(l.value().unwrap().abs() <= l.spread() + 0.11);
        let alternating: Vec<f64> = (1..=10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(matches!(limit_functional(&alternating, policy()).unwrap(), Limit::Divergent { .. }));
        assert!(matches!(limit_functional(&[1.0], policy()), Err(Error::SequenceTooShort { .. })));
        assert!(LimitPolicy::new(1, 0.1).is_err());
        assert!(LimitPolicy::new(2, 0.0).is_err());
    }

    #[test]
    fn identity_and_shift() {
        let l = Arc::new(build_lattice(&GeometrySpec::window(100)).unwrap());
        let f = folner_boxes(&l, &[10, 20, 40], 4, &[2.0]).unwrap();
        let id = FinitePropOperator::identity(l.clone(), 1);
        assert_eq!(roe_trace(&id, &f, policy()).unwrap().value(), Some(1.0));
        assert_eq!(roe_trace(&shift_operator(&l), &f, policy()).unwrap().value(), Some(0.0));
    }

    #[test]
    fn torus_density_is_exact() {
        let l = Arc::new(build_lattice(&GeometrySpec::torus(6)).unwrap());
        let d = magnetic_dirac(&l, TAU / 36.0, DiracStencil::default()).unwrap();
        let whole = FolnerSequence::whole(l.clone());
        let est = analytic_index_density(&d, &FilterFunction::gaussian(1.0), &whole, policy(), None).unwrap();
        assert!(matches!(est.limit, Limit::Exact { .. }));
        assert!((est.value().unwrap() * 36.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn direct_route_matches_spectral_route() {
        let l = Arc::new(build_lattice(&GeometrySpec::torus(4)).unwrap());
        let d = magnetic_dirac(&l, TAU / 16.0, DiracStencil::default()).unwrap();
        let whole = FolnerSequence::whole(l.clone());
        let f = FilterFunction::gaussian(1.0);
        let a = analytic_index_density(&d, &f, &whole, policy(), None).unwrap().value().unwrap();
        for method in [FilterMethod::Eigen, FilterMethod::chebyshev()] {
            let b = analytic_index_density_direct(&d, &f, method, &whole, policy()).unwrap().value().unwrap();
            assert!((a - b).abs() < 1e-9, "{method:?}");
        }
    }

    #[test]
    fn odd_filters_are_refused() {
        let l = Arc::new(build_lattice(&GeometrySpec::torus(4)).unwrap());
        let d = magnetic_dirac(&l, 0.0, DiracStencil::default()).unwrap();
        let f = FilterFunction::Table { abscissae: vec![0.0, 1.0], values: vec![2.0, 0.0] };
        let r = analytic_index_density(&d, &f, &FolnerSequence::whole(l), policy(), None);
        assert!(matches!(r, Err(Error::FilterNotAdmissible(_))));
    }
}
