use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Lattice;
use crate::operator::Block;
use crate::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GaugeDescriptor {
    Trivial { rank: usize },
    /// Landau gauge, flux `flux` radians per plaquette.
    UniformFlux { flux: f64 },
    Tensor { left: Box<GaugeDescriptor>, right: Box<GaugeDescriptor> },
    DirectSum { left: Box<GaugeDescriptor>, right: Box<GaugeDescriptor> },
    GaugeTransformed { base: Box<GaugeDescriptor> },
}

/// Rank-`n` bundle given by unitary transports on forward hops; the reverse
/// hop carries the adjoint. `link(x, μ)` transports from `x+μ` back to `x`.
#[derive(Clone, Debug)]
pub struct GaugeBundle {
    lattice: Arc<Lattice>,
    rank: usize,
    links: Vec<[Option<Block>; 2]>,
    descriptor: GaugeDescriptor,
}

impl GaugeBundle {
    pub fn trivial(lattice: &Arc<Lattice>, rank: usize) -> Self {
        let links = (0..lattice.len())
            .map(|x| {
                let mut l: [Option<Block>; 2] = [None, None];
                for (axis, slot) in l.iter_mut().enumerate().take(lattice.dim()) {
                    if lattice.forward(x, axis).is_some() {
                        *slot = Some(Block::identity(rank));
                    }
                }
                l
            })
            .collect();
        Self { lattice: lattice.clone(), rank, links, descriptor: GaugeDescriptor::Trivial { rank } }
    }

    /// Landau gauge with flux `φ` through every plaquette: `U_y(x) = e^{iφx}`,
    /// `U_x = 1`, except that the periodic x-seam carries `e^{−iφN_x y}`.
    pub fn uniform_flux(lattice: &Arc<Lattice>, flux: f64) -> Result<Self> {
        if lattice.dim() != 2 {
            return Err(Error::InvalidGeometry("uniform flux needs a two-dimensional lattice".into()));
        }
        let (nx, ny) = (lattice.extent()[0], lattice.extent()[1]);
        if lattice.is_periodic() {
            let quanta = flux * (nx * ny) as f64 / TAU;
            if (quanta - quanta.round()).abs() > 1e-9 {
                return Err(Error::FluxNotQuantized { flux, plaquettes: nx * ny });
            }
        }
        let phase = |a: f64| Block::scalar(1, C64::from_polar(1.0, a));
        let links = (0..lattice.len())
            .map(|s| {
                let [x, y] = lattice.coords(s);
                let ux = lattice.forward(s, 0).map(|_| {
                    if lattice.wraps_forward(s, 0) {
                        phase(-flux * (nx * y) as f64)
                    } else {
                        Block::identity(1)
                    }
                });
                let uy = lattice.forward(s, 1).map(|_| phase(flux * x as f64));
                [ux, uy]
            })
            .collect();
        Ok(Self { lattice: lattice.clone(), rank: 1, links, descriptor: GaugeDescriptor::UniformFlux { flux } })
    }

    /// Flux quantum count `n` on a torus: `φ = 2πn / (N_x N_y)`.
    pub fn flux_quanta(lattice: &Arc<Lattice>, quanta: i64) -> Result<Self> {
        let area = lattice.extent().iter().product::<usize>() as f64;
        Self::uniform_flux(lattice, TAU * quanta as f64 / area)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn descriptor(&self) -> &GaugeDescriptor {
        &self.descriptor
    }

    /// Transport on the forward hop `x → x+μ`.
    pub fn link(&self, x: usize, axis: usize) -> Option<&Block> {
        self.links.get(x).and_then(|l| l.get(axis)).and_then(Option::as_ref)
    }

    /// Transport attached to the hop from `x` to a neighbor `y`: the link for
    /// forward hops, its adjoint for backward ones.
    pub fn hop_transport(&self, x: usize, y: usize) -> Option<Block> {
        for axis in 0..self.lattice.dim() {
            if self.lattice.forward(x, axis) == Some(y) {
                return self.link(x, axis).cloned();
            }
            if self.lattice.backward(x, axis) == Some(y) {
                return self.link(y, axis).map(Block::adjoint);
            }
        }
        None
    }

    /// Holonomy `U_x(s) U_y(s+x̂) U_x(s+ŷ)* U_y(s)*` around the plaquette based at `s`.
    pub fn holonomy(&self, s: usize) -> Option<Block> {
        let [_, sx, _, sy] = self.lattice.plaquette(s)?;
        let a = self.link(s, 0)?;
        let b = self.link(sx, 1)?;
        let c = self.link(sy, 0)?;
        let d = self.link(s, 1)?;
        Some(a.mul(b).mul(&c.adjoint()).mul(&d.adjoint()))
    }

    /// Fiberwise tensor product; `self` is the outer index.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_same_lattice(other)?;
        let links = self
            .links
            .iter()
            .zip(&other.links)
            .map(|(a, b)| {
                let mut l: [Option<Block>; 2] = [None, None];
                for axis in 0..2 {
                    if let (Some(u), Some(v)) = (&a[axis], &b[axis]) {
                        l[axis] = Some(u.kron(v));
                    }
                }
                l
            })
            .collect();
        Ok(Self {
            lattice: self.lattice.clone(),
            rank: self.rank * other.rank,
            links,
            descriptor: GaugeDescriptor::Tensor {
                left: Box::new(self.descriptor.clone()),
                right: Box::new(other.descriptor.clone()),
            },
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check_same_lattice(other)?;
        let (p, q) = (self.rank, other.rank);
        let links = self
            .links
            .iter()
            .zip(&other.links)
            .map(|(a, b)| {
                let mut l: [Option<Block>; 2] = [None, None];
                for axis in 0..2 {
                    if let (Some(u), Some(v)) = (&a[axis], &b[axis]) {
                        l[axis] = Some(Block::from_fn(p + q, |i, j| match (i < p, j < p) {
                            (true, true) => u.get(i, j),
                            (false, false) => v.get(i - p, j - p),
                            _ => C64::new(0.0, 0.0),
                        }));
                    }
                }
                l
            })
            .collect();
        Ok(Self {
            lattice: self.lattice.clone(),
            rank: p + q,
            links,
            descriptor: GaugeDescriptor::DirectSum {
                left: Box::new(self.descriptor.clone()),
                right: Box::new(other.descriptor.clone()),
            },
        })
    }

    /// `U(x→y) ↦ g(x) U(x→y) g(y)*` for a site-wise phase `g` (rank 1 only).
    pub fn gauge_transform(&self, g: &[C64]) -> Result<Self> {
        if g.len() != self.lattice.len() {
            return Err(Error::ShapeMismatch("gauge function length".into()));
        }
        let links = (0..self.lattice.len())
            .map(|x| {
                let mut l = self.links[x].clone();
                for (axis, slot) in l.iter_mut().enumerate() {
                    if let (Some(u), Some(y)) = (slot.as_mut(), self.lattice.forward(x, axis)) {
                        *u = u.scale(g[x] * g[y].conj());
                    }
                }
                l
            })
            .collect();
        Ok(Self {
            lattice: self.lattice.clone(),
            rank: self.rank,
            links,
            descriptor: GaugeDescriptor::GaugeTransformed { base: Box::new(self.descriptor.clone()) },
        })
    }

    /// Largest deviation of any link from unitarity.
    pub fn unitarity_defect(&self) -> f64 {
        let id = Block::identity(self.rank);
        self.links.iter().flatten().flatten().map(|u| u.mul(&u.adjoint()).max_abs_diff(&id)).fold(0.0, f64::max)
    }

    fn check_same_lattice(&self, other: &Self) -> Result<()> {
        if *self.lattice != *other.lattice {
            return Err(Error::ShapeMismatch("bundles live on different lattices".into()));
        }
        Ok(())
    }

    /// Deterministic text covering every transport bit pattern; the input to
    /// cache keys.
    pub fn fingerprint_text(&self) -> String {
        let mut s = format!("{:?}|{:?}|{}|rank{}|", self.lattice.kind(), self.lattice.extent(), self.lattice.spacing(), self.rank);
        for (x, l) in self.links.iter().enumerate() {
            for (axis, u) in l.iter().enumerate() {
                if let Some(u) = u {
                    let _ = write!(s, "{x}.{axis}:");
                    for z in u.entries() {
                        let _ = write!(s, "{:016x}{:016x}", z.re.to_bits(), z.im.to_bits());
                    }
                    s.push(';');
                }
            }
        }
        s
    }
}
