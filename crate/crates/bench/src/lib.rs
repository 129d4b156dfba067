//! Fixtures shared by the criterion benches.

use std::f64::consts::TAU;
use std::sync::Arc;

use folner_core::geometry::{build_lattice, GeometrySpec, Lattice};
use folner_core::models::{magnetic_dirac, DiracStencil, GradedOperator};

pub fn lattice(spec: GeometrySpec) -> Arc<Lattice> {
    Arc::new(build_lattice(&spec).expect("valid geometry"))
}

/// Overlap operator on an `n × n` torus with one flux quantum.
pub fn torus_model(n: usize) -> GradedOperator {
    let l = lattice(GeometrySpec::torus(n));
    magnetic_dirac(&l, TAU / (n * n) as f64, DiracStencil::default()).expect("quantized flux")
}

/// Chiral forward-difference operator on an `l × l` window at flux 2π/16.
pub fn plane_forward(l: usize) -> GradedOperator {
    magnetic_dirac(&lattice(GeometrySpec::plane(l)), TAU / 16.0, DiracStencil::ForwardDifference).expect("valid flux")
}
