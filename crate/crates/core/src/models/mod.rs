//! Graded lattice Dirac operators, the Hardy/Toeplitz module, and gauge twists.

mod dirac;
mod gauge;
mod hardy;
mod module;
mod spectral;

pub use dirac::{dirac_from_bundle, magnetic_dirac, twist_by_bundle, DiracStencil, GradedOperator};
pub use gauge::{GaugeBundle, GaugeDescriptor};
pub use hardy::{hardy_module, toeplitz_index, winding_symbol, HardySpec};
pub use module::FredholmModule;
pub use spectral::{SpectralCache, SpectralDensity, SpectralPart, Transfer};
