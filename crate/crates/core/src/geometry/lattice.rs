use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Torus,
    PlaneWindow,
    Circle,
    HalfLine,
}

impl LatticeKind {
    pub fn is_periodic(self) -> bool {
        matches!(self, LatticeKind::Torus | LatticeKind::Circle)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub kind: LatticeKind,
    pub extent: Vec<usize>,
    #[serde(default = "unit_spacing")]
    pub spacing: f64,
}

fn unit_spacing() -> f64 {
    1.0
}

impl GeometrySpec {
    pub fn torus(n: usize) -> Self {
        Self { kind: LatticeKind::Torus, extent: vec![n, n], spacing: 1.0 }
    }

    pub fn plane(l: usize) -> Self {
        Self { kind: LatticeKind::PlaneWindow, extent: vec![l, l], spacing: 1.0 }
    }

    pub fn window(l: usize) -> Self {
        Self { kind: LatticeKind::PlaneWindow, extent: vec![l], spacing: 1.0 }
    }

    pub fn circle(n: usize) -> Self {
        Self { kind: LatticeKind::Circle, extent: vec![n], spacing: 1.0 }
    }

    pub fn half_line(l: usize) -> Self {
        Self { kind: LatticeKind::HalfLine, extent: vec![l], spacing: 1.0 }
    }
}

/// Plaquette corners in counterclockwise order starting at the base site.
pub type Corners = [usize; 4];

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    kind: LatticeKind,
    extent: Vec<usize>,
    spacing: f64,
    coords: Vec<[usize; 2]>,
    boundary: Vec<bool>,
}

pub fn build_lattice(spec: &GeometrySpec) -> Result<Lattice> {
    let d = spec.extent.len();
    if !(1..=2).contains(&d) {
        return Err(Error::InvalidGeometry(format!("dimension {d} not in {{1, 2}}")));
    }
    if let Some(&e) = spec.extent.iter().find(|&&e| e < 2) {
        return Err(Error::InvalidGeometry(format!("extent {e} < 2")));
    }
    match (spec.kind, d) {
        (LatticeKind::Circle | LatticeKind::HalfLine, 2) => {
            return Err(Error::InvalidGeometry(format!("{:?} is one-dimensional", spec.kind)))
        }
        _ => {}
    }
    if !(spec.spacing.is_finite() && spec.spacing > 0.0) {
        return Err(Error::InvalidGeometry(format!("spacing {} must be positive", spec.spacing)));
    }
    let (nx, ny) = (spec.extent[0], if d == 2 { spec.extent[1] } else { 1 });
    let coords: Vec<[usize; 2]> = (0..nx).flat_map(|x| (0..ny).map(move |y| [x, y])).collect();
    let mut lattice = Lattice {
        kind: spec.kind,
        extent: spec.extent.clone(),
        spacing: spec.spacing,
        coords,
        boundary: Vec::new(),
    };
    lattice.boundary = (0..lattice.len())
        .map(|s| (0..d).any(|a| lattice.forward(s, a).is_none() || lattice.backward(s, a).is_none()))
        .collect();
    Ok(lattice)
}

impl Lattice {
    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.kind.is_periodic()
    }

    pub fn coords(&self, site: usize) -> [usize; 2] {
        self.coords[site]
    }

    pub fn is_boundary(&self, site: usize) -> bool {
        self.boundary[site]
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site < self.len() {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange { site, len: self.len() })
        }
    }

    fn ny(&self) -> usize {
        if self.dim() == 2 {
            self.extent[1]
        } else {
            1
        }
    }

    pub fn index_of(&self, c: [usize; 2]) -> Option<usize> {
        let ny = self.ny();
        if c[0] < self.extent[0] && c[1] < ny {
            Some(c[0] * ny + c[1])
        } else {
            None
        }
    }

    /// Index of the site at signed integer coordinates, wrapping on periodic
    /// lattices and returning `None` outside a window.
    pub fn site_at(&self, x: i64, y: i64) -> Option<usize> {
        let wrap = |v: i64, n: usize| -> Option<usize> {
            if self.is_periodic() {
                Some(v.rem_euclid(n as i64) as usize)
            } else if v >= 0 && (v as usize) < n {
                Some(v as usize)
            } else {
                None
            }
        };
        let cx = wrap(x, self.extent[0])?;
        let cy = if self.dim() == 2 { wrap(y, self.extent[1])? } else if y == 0 { 0 } else { return None };
        self.index_of([cx, cy])
    }

    fn step(&self, site: usize, axis: usize, delta: i64) -> Option<usize> {
        if axis >= self.dim() {
            return None;
        }
        let c = self.coords[site];
        let (mut x, mut y) = (c[0] as i64, c[1] as i64);
        if axis == 0 {
            x += delta;
        } else {
            y += delta;
        }
        self.site_at(x, y)
    }

    pub fn forward(&self, site: usize, axis: usize) -> Option<usize> {
        self.step(site, axis, 1)
    }

    pub fn backward(&self, site: usize, axis: usize) -> Option<usize> {
        self.step(site, axis, -1)
    }

    /// Whether the forward hop from `site` along axis 0 crosses the periodic seam.
    pub fn wraps_forward(&self, site: usize, axis: usize) -> bool {
        self.is_periodic() && self.coords[site][axis] + 1 == self.extent[axis]
    }

    /// Hop targets, with multiplicity (an extent-2 torus reaches the same
    /// neighbor both ways).
    pub fn neighbors(&self, site: usize) -> Vec<usize> {
        (0..self.dim())
            .flat_map(|a| [self.backward(site, a), self.forward(site, a)])
            .flatten()
            .collect()
    }

    /// Neighbors in the ℓ∞ sense (king moves in 2D).
    pub fn chebyshev_neighbors(&self, site: usize) -> Vec<usize> {
        let c = self.coords[site];
        let (x, y) = (c[0] as i64, c[1] as i64);
        let mut out = Vec::new();
        let dys: &[i64] = if self.dim() == 2 { &[-1, 0, 1] } else { &[0] };
        for dx in [-1i64, 0, 1] {
            for &dy in dys {
                if dx == 0 && dy == 0 {
                    continue;
                }
                if let Some(s) = self.site_at(x + dx, y + dy) {
                    if s != site && !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    fn axis_offset(&self, a: usize, b: usize, axis: usize) -> usize {
        let (ca, cb) = (self.coords[a][axis], self.coords[b][axis]);
        let diff = ca.abs_diff(cb);
        if self.is_periodic() {
            diff.min(self.extent[axis] - diff)
        } else {
            diff
        }
    }

    /// Graph distance in hops (ℓ1 with wrap on periodic lattices).
    pub fn hop_distance(&self, a: usize, b: usize) -> usize {
        (0..self.dim()).map(|ax| self.axis_offset(a, b, ax)).sum()
    }

    /// ℓ∞ distance in hops.
    pub fn chebyshev_distance(&self, a: usize, b: usize) -> usize {
        (0..self.dim()).map(|ax| self.axis_offset(a, b, ax)).max().unwrap_or(0)
    }

    /// Metric distance in length units.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.hop_distance(a, b) as f64 * self.spacing
    }

    /// Multi-source breadth-first hop distances; `usize::MAX` where unreachable.
    pub fn hop_distances_from(&self, sources: &[usize]) -> Vec<usize> {
        self.bfs(sources, |s| self.neighbors(s))
    }

    /// Multi-source ℓ∞ distances.
    pub fn chebyshev_distances_from(&self, sources: &[usize]) -> Vec<usize> {
        self.bfs(sources, |s| self.chebyshev_neighbors(s))
    }

    fn bfs(&self, sources: &[usize], next: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for t in next(s) {
                if dist[t] == usize::MAX {
                    dist[t] = dist[s] + 1;
                    queue.push_back(t);
                }
            }
        }
        dist
    }

    /// Corners of the plaquette based at `site`, if it exists.
    pub fn plaquette(&self, site: usize) -> Option<Corners> {
        if self.dim() != 2 {
            return None;
        }
        let sx = self.forward(site, 0)?;
        let sy = self.forward(site, 1)?;
        let sxy = self.forward(sx, 1)?;
        Some([site, sx, sxy, sy])
    }

    pub fn plaquette_bases(&self) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.plaquette(s).is_some()).collect()
    }

    /// Sites in the ℓ∞ box `[x0, x0+lx) × [y0, y0+ly)` (window coordinates).
    pub fn box_sites(&self, origin: [usize; 2], size: [usize; 2]) -> Vec<usize> {
        let ny = if self.dim() == 2 { size[1] } else { 1 };
        let mut out = Vec::with_capacity(size[0] * ny);
        for x in origin[0]..origin[0] + size[0] {
            for y in origin[1]..origin[1] + ny {
                if let Some(s) = self.index_of([x, y]) {
                    out.push(s);
                }
            }
        }
        out.sort_unstable();
        out
    }
}
