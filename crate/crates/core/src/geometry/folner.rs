use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{Lattice, LatticeKind};

/// Nested finite subsets with a cached deficiency table.
#[derive(Clone, Debug)]
pub struct FolnerSequence {
    lattice: Arc<Lattice>,
    sets: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    radii: Vec<f64>,
    table: Vec<Vec<f64>>,
    exhaustive: bool,
}

/// `#∂_rΓ / #Γ` where `∂_rΓ` collects sites closer than `r` to Γ and within
/// `r` of its complement.
///
/// The upper comparison is inclusive: with integer hop distances the fully
/// strict rule makes `∂_2` of an interval miss the second site on each side.
pub fn folner_deficiency(lattice: &Lattice, subset: &[usize], r: f64) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must be positive")));
    }
    let mut inside = vec![false; lattice.len()];
    for &s in subset {
        lattice.check_site(s)?;
        inside[s] = true;
    }
    let complement: Vec<usize> = (0..lattice.len()).filter(|&s| !inside[s]).collect();
    if complement.is_empty() {
        return Ok(0.0);
    }
    let h = lattice.spacing();
    let d_in = lattice.hop_distances_from(subset);
    let d_out = lattice.hop_distances_from(&complement);
    let count = (0..lattice.len())
        .filter(|&s| {
            d_in[s] != usize::MAX
                && d_out[s] != usize::MAX
                && (d_in[s] as f64) * h < r
                && (d_out[s] as f64) * h <= r
        })
        .count();
    let distinct = {
        let mut v = subset.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    Ok(count as f64 / distinct as f64)
}

/// Centered nested boxes (anchored at the origin on a half-line).
///
/// Every box keeps at least `margin` sites to the window edge so that
/// downstream radii up to `margin` see genuine complement on all sides.
pub fn folner_boxes(
    lattice: &Arc<Lattice>,
    schedule: &[usize],
    margin: usize,
    radii: &[f64],
) -> Result<FolnerSequence> {
    if schedule.is_empty() {
        return Err(Error::InvalidSchedule("schedule is empty".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule("box sizes must be strictly increasing".into()));
    }
    if schedule[0] == 0 {
        return Err(Error::InvalidSchedule("box size 0".into()));
    }
    let d = lattice.dim();
    let mut sets = Vec::with_capacity(schedule.len());
    for &size in schedule {
        let mut origin = [0usize; 2];
        let mut extent = [1usize; 2];
        for axis in 0..d {
            let n = lattice.extent()[axis];
            let o = match lattice.kind() {
                LatticeKind::PlaneWindow => {
                    if size + 2 * margin > n {
                        return Err(Error::BoxExceedsMargin { size, margin, extent: n });
                    }
                    (n - size) / 2
                }
                LatticeKind::HalfLine => {
                    if size + margin > n {
                        return Err(Error::BoxExceedsMargin { size, margin, extent: n });
                    }
                    0
                }
                k => {
                    return Err(Error::InvalidGeometry(format!(
                        "Følner boxes need a plane window or half-line, got {k:?}"
                    )))
                }
            };
            origin[axis] = o;
            extent[axis] = size;
        }
        sets.push(lattice.box_sites(origin, extent));
    }
    FolnerSequence::from_sets(lattice.clone(), sets, schedule.to_vec(), radii)
}

impl FolnerSequence {
    pub fn from_sets(
        lattice: Arc<Lattice>,
        sets: Vec<Vec<usize>>,
        sizes: Vec<usize>,
        radii: &[f64],
    ) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidSchedule("no sets".into()));
        }
        for w in sets.windows(2) {
            if !is_subset(&w[0], &w[1]) {
                return Err(Error::InvalidSchedule("sets are not nested".into()));
            }
        }
        let table = sets
            .iter()
            .map(|s| radii.iter().map(|&r| folner_deficiency(&lattice, s, r)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { lattice, sets, sizes, radii: radii.to_vec(), table, exhaustive: false })
    }

    /// The whole (finite) space as a single set; the per-volume average over
    /// it is exact rather than a limit.
    pub fn whole(lattice: Arc<Lattice>) -> Self {
        let all: Vec<usize> = (0..lattice.len()).collect();
        let n = lattice.extent()[0];
        Self {
            lattice,
            sets: vec![all],
            sizes: vec![n],
            radii: Vec::new(),
            table: vec![Vec::new()],
            exhaustive: true,
        }
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    /// Box side lengths as scheduled.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    /// Cached value when `r` is in the table, otherwise computed on demand.
    pub fn deficiency(&self, i: usize, r: f64) -> Result<f64> {
        if let Some(k) = self.radii.iter().position(|&x| x == r) {
            return Ok(self.table[i][k]);
        }
        folner_deficiency(&self.lattice, &self.sets[i], r)
    }

    pub fn deficiency_column(&self, r: f64) -> Result<Vec<f64>> {
        (0..self.len()).map(|i| self.deficiency(i, r)).collect()
    }
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    // Both sorted.
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}
