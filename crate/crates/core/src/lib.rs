//! Numerical workbench comparing Følner-averaged analytic index densities
//! with lattice Chern–Weil pairings.
//!
//! The crate is organised bottom-up: [`geometry`] builds lattices and Følner
//! sequences, [`operator`] holds finite-propagation operators, [`models`]
//! builds the graded Dirac and Hardy/Toeplitz models, [`functional`] applies
//! filter functions, [`trace`] turns kernels into per-volume traces,
//! [`chern_weil`] computes the topological side, [`cocycles`] evaluates
//! Chern–Connes characters of finite Fredholm modules, and [`symbols`]
//! assembles and audits patchwise symbols.

// `!(x > 0.0)` is deliberate: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chern_weil;
pub mod cocycles;
pub mod error;
pub mod functional;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod operator;
pub mod symbols;
pub mod trace;

pub use error::{Error, Result};

/// Complex scalar used throughout; identical to `num_complex::Complex<f64>`.
pub type C64 = faer::c64;
pub use faer::Mat;

pub use chern_weil::{CompactPairing, CutoffFamily, DiscreteForm, IndexModel, MixedForm};
pub use cocycles::{Calibration, CyclicCochain, Parity};
pub use functional::{FilterFunction, FilterMethod, KernelMatrix, MethodTag, QuasiLocalityProfile};
pub use geometry::{ColoredCover, FolnerSequence, GeometrySpec, Lattice, LatticeKind, PartitionOfUnity};
pub use models::{DiracStencil, FredholmModule, GaugeBundle, GaugeDescriptor, GradedOperator, HardySpec, SpectralCache};
pub use operator::{Block, FinitePropOperator};
pub use symbols::{SymbolField, SymbolRegime};
pub use trace::{Limit, LimitPolicy, TraceEstimate};
