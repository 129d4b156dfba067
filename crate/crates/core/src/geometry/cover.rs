use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Lattice;

/// Ball cover over a net, with a proper coloring of its intersection graph.
#[derive(Clone, Debug)]
pub struct ColoredCover {
    lattice: Arc<Lattice>,
    spacing: usize,
    radius: f64,
    net: Vec<usize>,
    members: Vec<Vec<usize>>,
    adjacency: Vec<Vec<usize>>,
    colors: Vec<usize>,
}

/// Greedy coloring in the given vertex order: each vertex takes the smallest
/// color not used by an already-colored neighbor.
pub fn greedy_coloring(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let mut colors = vec![usize::MAX; adjacency.len()];
    for v in 0..adjacency.len() {
        let mut used: Vec<usize> = adjacency[v].iter().map(|&u| colors[u]).filter(|&c| c != usize::MAX).collect();
        used.sort_unstable();
        used.dedup();
        let mut c = 0;
        for u in used {
            if u == c {
                c += 1;
            } else if u > c {
                break;
            }
        }
        colors[v] = c;
    }
    colors
}

pub fn max_degree(adjacency: &[Vec<usize>]) -> usize {
    adjacency.iter().map(Vec::len).max().unwrap_or(0)
}

pub fn is_proper_coloring(adjacency: &[Vec<usize>], colors: &[usize]) -> bool {
    adjacency.iter().enumerate().all(|(v, ns)| ns.iter().all(|&u| u == v || colors[u] != colors[v]))
}

/// Net of spacing `s` (coordinates divisible by `s`), closed ℓ∞ balls of
/// radius `ε`. Sites the regular net leaves uncovered near a window edge get
/// their own net point, so the union always covers.
pub fn build_colored_cover(lattice: &Arc<Lattice>, spacing: usize, radius: f64) -> Result<ColoredCover> {
    if spacing < 1 {
        return Err(Error::InvalidArgument("net spacing must be >= 1".into()));
    }
    let h = lattice.spacing();
    if radius < spacing as f64 * h / 2.0 {
        return Err(Error::CoveringCondition { spacing, radius });
    }
    let reach = (radius / h + 1e-12).floor() as usize;
    let mut net: Vec<usize> = (0..lattice.len())
        .filter(|&s| {
            let c = lattice.coords(s);
            (0..lattice.dim()).all(|a| c[a] % spacing == 0)
        })
        .collect();
    let mut members: Vec<Vec<usize>> = net.iter().map(|&x| ball(lattice, x, reach)).collect();
    let mut covered = vec![false; lattice.len()];
    for m in &members {
        for &s in m {
            covered[s] = true;
        }
    }
    for s in 0..lattice.len() {
        if !covered[s] {
            let b = ball(lattice, s, reach);
            for &t in &b {
                covered[t] = true;
            }
            net.push(s);
            members.push(b);
        }
    }
    // Lexicographic net order drives the greedy coloring.
    let mut order: Vec<usize> = (0..net.len()).collect();
    order.sort_by_key(|&i| net[i]);
    let net: Vec<usize> = order.iter().map(|&i| net[i]).collect();
    let members: Vec<Vec<usize>> = order.iter().map(|&i| members[i].clone()).collect();

    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); lattice.len()];
    for (i, m) in members.iter().enumerate() {
        for &s in m {
            containing[s].push(i);
        }
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); members.len()];
    for c in &containing {
        for &i in c {
            for &j in c {
                if i != j {
                    adjacency[i].push(j);
                }
            }
        }
    }
    for a in &mut adjacency {
        a.sort_unstable();
        a.dedup();
    }
    let colors = greedy_coloring(&adjacency);
    Ok(ColoredCover { lattice: lattice.clone(), spacing, radius, net, members, adjacency, colors })
}

fn ball(lattice: &Lattice, centre: usize, reach: usize) -> Vec<usize> {
    let d = lattice.chebyshev_distances_from(&[centre]);
    (0..lattice.len()).filter(|&s| d[s] <= reach).collect()
}

impl ColoredCover {
    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn spacing(&self) -> usize {
        self.spacing
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn net(&self) -> &[usize] {
        &self.net
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color_count(&self) -> usize {
        self.colors.iter().max().map_or(0, |&c| c + 1)
    }

    pub fn max_degree(&self) -> usize {
        max_degree(&self.adjacency)
    }

    /// Largest number of members containing a single site.
    pub fn multiplicity(&self) -> usize {
        let mut count = vec![0usize; self.lattice.len()];
        for m in &self.members {
            for &s in m {
                count[s] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    }

    pub fn covers_all(&self) -> bool {
        let mut covered = vec![false; self.lattice.len()];
        for m in &self.members {
            for &s in m {
                covered[s] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }
}

/// Per-member weights on sites, summing to one everywhere.
#[derive(Clone, Debug)]
pub struct PartitionOfUnity {
    taper: f64,
    weights: Vec<Vec<f64>>,
}

/// Plateau-and-ramp bumps `min(1, d∞(x, Mᵢᶜ)/w)`, normalized site-wise.
/// The Lipschitz bound `1/w` per hop is verified rather than assumed; covers
/// whose overlaps are too thin for the taper are rejected.
pub fn partition_of_unity(cover: &ColoredCover, taper: f64) -> Result<PartitionOfUnity> {
    if !(taper >= 1.0) {
        return Err(Error::InvalidArgument(format!("taper {taper} must be >= 1")));
    }
    let lattice = &cover.lattice;
    let n = lattice.len();
    let bumps: Vec<Vec<f64>> = cover
        .members
        .iter()
        .map(|m| {
            let mut inside = vec![false; n];
            for &s in m {
                inside[s] = true;
            }
            let complement: Vec<usize> = (0..n).filter(|&s| !inside[s]).collect();
            let d = lattice.chebyshev_distances_from(&complement);
            (0..n)
                .map(|s| {
                    if !inside[s] {
                        0.0
                    } else if d[s] == usize::MAX {
                        1.0
                    } else {
                        (d[s] as f64 / taper).min(1.0)
                    }
                })
                .collect()
        })
        .collect();
    let mut total = vec![0.0; n];
    for b in &bumps {
        for s in 0..n {
            total[s] += b[s];
        }
    }
    if let Some(s) = (0..n).find(|&s| total[s] == 0.0) {
        return Err(Error::InvalidArgument(format!("site {s} is not covered")));
    }
    let weights: Vec<Vec<f64>> = bumps.iter().map(|b| (0..n).map(|s| b[s] / total[s]).collect()).collect();
    let pou = PartitionOfUnity { taper, weights };
    for (i, w) in pou.weights.iter().enumerate() {
        let jump = hop_lipschitz(lattice, w);
        if jump > 1.0 / taper + 1e-12 {
            return Err(Error::OverlapTooThin { taper, member: i, jump });
        }
    }
    Ok(pou)
}

/// Largest change of `f` across a single hop.
pub fn hop_lipschitz(lattice: &Lattice, f: &[f64]) -> f64 {
    let mut m: f64 = 0.0;
    for s in 0..lattice.len() {
        for t in lattice.neighbors(s) {
            m = m.max((f[s] - f[t]).abs());
        }
    }
    m
}

impl PartitionOfUnity {
    pub fn taper(&self) -> f64 {
        self.taper
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn weight(&self, member: usize) -> &[f64] {
        &self.weights[member]
    }

    pub fn max_sum_deviation(&self) -> f64 {
        let n = self.weights.first().map_or(0, Vec::len);
        (0..n)
            .map(|s| (self.weights.iter().map(|w| w[s]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
