//! Lattice differential forms, plaquette curvature, Chern characters and the
//! topological side of the index pairings.
//!
//! Cells of degree 0, 1, 2 are sites, forward hops (`site·d + axis`) and
//! plaquettes (indexed by their base site). Reverse hops carry the negated
//! value, so 1-forms are antisymmetric by construction.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{FolnerSequence, Lattice};
use crate::models::{GaugeBundle, GradedOperator};
use crate::trace::{LimitPolicy, TraceEstimate};
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteForm {
    lattice: Arc<Lattice>,
    degree: usize,
    values: Vec<f64>,
}

fn cell_count(lattice: &Lattice, degree: usize) -> usize {
    match degree {
        1 => lattice.len() * lattice.dim(),
        _ => lattice.len(),
    }
}

/// Vertices of the cell, or `None` if it does not exist.
fn cell_vertices(lattice: &Lattice, degree: usize, index: usize) -> Option<Vec<usize>> {
    match degree {
        0 => Some(vec![index]),
        1 => {
            let d = lattice.dim();
            let (s, axis) = (index / d, index % d);
            lattice.forward(s, axis).map(|t| vec![s, t])
        }
        2 => lattice.plaquette(index).map(|c| c.to_vec()),
        _ => None,
    }
}

impl DiscreteForm {
    pub fn zeros(lattice: &Arc<Lattice>, degree: usize) -> Result<Self> {
        if degree > lattice.dim() {
            return Err(Error::DegreeMismatch(format!("degree {degree} on a {}-dimensional lattice", lattice.dim())));
        }
        Ok(Self { lattice: lattice.clone(), degree, values: vec![0.0; cell_count(lattice, degree)] })
    }

    /// Values on all cell slots; slots of missing cells must be zero.
    pub fn from_values(lattice: &Arc<Lattice>, degree: usize, values: Vec<f64>) -> Result<Self> {
        let mut f = Self::zeros(lattice, degree)?;
        if values.len() != f.values.len() {
            return Err(Error::ShapeMismatch(format!("{} values for {} cells", values.len(), f.values.len())));
        }
        for (i, &v) in values.iter().enumerate() {
            if v != 0.0 && cell_vertices(lattice, degree, i).is_none() {
                return Err(Error::ShapeMismatch(format!("value on missing cell {i} of degree {degree}")));
            }
        }
        f.values = values;
        Ok(f)
    }

    /// Form with `value(cell)` on every existing cell.
    pub fn from_fn(lattice: &Arc<Lattice>, degree: usize, value: impl Fn(usize) -> f64) -> Result<Self> {
        let mut f = Self::zeros(lattice, degree)?;
        for i in 0..f.values.len() {
            if cell_vertices(lattice, degree, i).is_some() {
                f.values[i] = value(i);
            }
        }
        Ok(f)
    }

    pub fn constant(lattice: &Arc<Lattice>, c: f64) -> Self {
        Self { lattice: lattice.clone(), degree: 0, values: vec![c; lattice.len()] }
    }

    /// Top-degree form equal to 1 on every cell.
    pub fn volume(lattice: &Arc<Lattice>) -> Self {
        Self::from_fn(lattice, lattice.dim(), |_| 1.0).expect("top degree is valid")
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Existing cells with their vertices.
    pub fn cells(&self) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
        (0..self.values.len()).filter_map(|i| cell_vertices(&self.lattice, self.degree, i).map(|v| (i, v)))
    }

    /// Value on the directed hop `x → y` of a 1-form.
    pub fn hop_value(&self, x: usize, y: usize) -> Option<f64> {
        if self.degree != 1 {
            return None;
        }
        let d = self.lattice.dim();
        for axis in 0..d {
            if self.lattice.forward(x, axis) == Some(y) {
                return Some(self.values[x * d + axis]);
            }
            if self.lattice.backward(x, axis) == Some(y) {
                return Some(-self.values[y * d + axis]);
            }
        }
        None
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if *self.lattice != *other.lattice {
            return Err(Error::ShapeMismatch("forms live on different lattices".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!("adding degrees {} and {}", self.degree, other.degree)));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { values, ..self.clone() })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { values: self.values.iter().map(|v| c * v).collect(), ..self.clone() }
    }

    /// Exterior derivative (coboundary on oriented cells).
    pub fn d(&self) -> Result<Self> {
        let l = &self.lattice;
        let dim = l.dim();
        match self.degree {
            0 if dim >= 1 => DiscreteForm::from_fn(l, 1, |i| {
                let (s, axis) = (i / dim, i % dim);
                let t = l.forward(s, axis).expect("existing hop");
                self.values[t] - self.values[s]
            }),
            1 if dim == 2 => DiscreteForm::from_fn(l, 2, |s| {
                let [_, sx, _, sy] = l.plaquette(s).expect("existing plaquette");
                let w = &self.values;
                (w[2 * s] + w[2 * sx + 1]) - (w[2 * sy] + w[2 * s + 1])
            }),
            _ => Err(Error::DegreeMismatch(format!("d of a top-degree form (degree {})", self.degree))),
        }
    }

    /// Discrete wedge: a 0-form enters through its average over the cell's
    /// vertices; two 1-forms through the antisymmetrized cubical cup product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let l = &self.lattice;
        let deg = self.degree + other.degree;
        if deg > l.dim() {
            return Err(Error::DegreeMismatch(format!("wedge of degree {deg} on a {}-dimensional lattice", l.dim())));
        }
        match (self.degree, other.degree) {
            (0, _) => DiscreteForm::from_fn(l, deg, |i| self.vertex_average(deg, i) * other.values[i]),
            (_, 0) => DiscreteForm::from_fn(l, deg, |i| self.values[i] * other.vertex_average(deg, i)),
            (1, 1) => DiscreteForm::from_fn(l, 2, |s| {
                let [_, sx, _, sy] = l.plaquette(s).expect("existing plaquette");
                let (a, b) = (&self.values, &other.values);
                let p = a[2 * s] * b[2 * sx + 1] - a[2 * s + 1] * b[2 * sy];
                let q = b[2 * s] * a[2 * sx + 1] - b[2 * s + 1] * a[2 * sy];
                0.5 * (p - q)
            }),
            _ => unreachable!("degrees bounded by the lattice dimension"),
        }
    }

    /// Average of a 0-form over the vertices of a cell of the given degree.
    fn vertex_average(&self, degree: usize, cell: usize) -> f64 {
        let v = cell_vertices(&self.lattice, degree, cell).expect("existing cell");
        v.iter().map(|&x| self.values[x]).sum::<f64>() / v.len() as f64
    }
}

/// Inhomogeneous form with at most one part per degree.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedForm {
    lattice: Arc<Lattice>,
    parts: Vec<Option<DiscreteForm>>,
}

impl MixedForm {
    pub fn new(lattice: &Arc<Lattice>, forms: Vec<DiscreteForm>) -> Result<Self> {
        let mut parts = vec![None; lattice.dim() + 1];
        for f in forms {
            if *f.lattice != **lattice {
                return Err(Error::ShapeMismatch("form on a different lattice".into()));
            }
            let slot = &mut parts[f.degree];
            match slot {
                None => *slot = Some(f),
                Some(existing) => *existing = existing.add(&f)?,
            }
        }
        Ok(Self { lattice: lattice.clone(), parts })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn part(&self, degree: usize) -> Option<&DiscreteForm> {
        self.parts.get(degree).and_then(Option::as_ref)
    }

    /// The degree-`k` part, zero when absent.
    pub fn part_or_zero(&self, degree: usize) -> Result<DiscreteForm> {
        match self.part(degree) {
            Some(f) => Ok(f.clone()),
            None => DiscreteForm::zeros(&self.lattice, degree),
        }
    }

    pub fn top(&self) -> Result<DiscreteForm> {
        self.part_or_zero(self.lattice.dim())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let forms = self.parts.iter().chain(&other.parts).flatten().cloned().collect();
        Self::new(&self.lattice, forms)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let mut forms = Vec::new();
        for a in self.parts.iter().flatten() {
            for b in other.parts.iter().flatten() {
                if a.degree + b.degree <= self.lattice.dim() {
                    forms.push(a.wedge(b)?);
                }
            }
        }
        Self::new(&self.lattice, forms)
    }
}

/// Per-plaquette `tr log` of the holonomy (principal branch), refusing
/// eigenvalues within `1e−8` of `−1`.
pub fn plaquette_curvature(e: &GaugeBundle) -> Result<DiscreteForm> {
    let l = e.lattice();
    if l.dim() != 2 {
        return Err(Error::InvalidGeometry("curvature lives on plaquettes of a 2-d lattice".into()));
    }
    let mut f = DiscreteForm::zeros(l, 2)?;
    for s in l.plaquette_bases() {
        let hol = e.holonomy(s).expect("plaquette links exist");
        let eigenvalues: Vec<C64> = if hol.rank() == 1 {
            vec![hol.get(0, 0)]
        } else {
            hol.to_mat()
                .eigenvalues()
                .map_err(|err| Error::Numerical(format!("holonomy eigenvalues: {err:?}")))?
        };
        let mut total = 0.0;
        for z in eigenvalues {
            let distance = (z + 1.0).norm();
            if distance < 1e-8 {
                return Err(Error::BranchAmbiguity { plaquette: s, distance });
            }
            total += z.arg();
        }
        f.values[s] = total;
    }
    Ok(f)
}

/// `(rank, tr F / 2π)`; higher parts vanish in two dimensions.
pub fn chern_character(e: &GaugeBundle) -> Result<MixedForm> {
    let l = e.lattice();
    let c0 = DiscreteForm::constant(l, e.rank() as f64);
    let c2 = plaquette_curvature(e)?.scale(1.0 / TAU);
    MixedForm::new(l, vec![c0, c2])
}

/// `arg(u(x+1)/u(x)) / 2π` on the hops of a circle: the form `u⁻¹du / 2πi`.
pub fn winding_form(lattice: &Arc<Lattice>, u: &[C64]) -> Result<DiscreteForm> {
    if lattice.dim() != 1 || u.len() != lattice.len() {
        return Err(Error::ShapeMismatch("winding form needs a symbol on a 1-d lattice".into()));
    }
    DiscreteForm::from_fn(lattice, 1, |x| {
        let y = lattice.forward(x, 0).expect("existing hop");
        let ratio = u[y] / u[x];
        if (ratio + 1.0).norm() < 1e-8 {
            f64::NAN
        } else {
            ratio.arg() / TAU
        }
    })
    .and_then(|f| match f.values.iter().position(|v| v.is_nan()) {
        Some(x) => Err(Error::BranchAmbiguity { plaquette: x, distance: 0.0 }),
        None => Ok(f),
    })
}

/// Shipped models with closed-form index forms (flat geometry, `Td ≡ 1`).
#[derive(Clone, Debug)]
pub enum IndexModel<'a> {
    /// Twisted flat Dirac operator: `ind = ch(E)` of its gauge bundle.
    Dirac(&'a GradedOperator),
    /// Toeplitz model of a symbol on a circle: the winding 1-form of `u`.
    Toeplitz { lattice: Arc<Lattice>, symbol: &'a [C64] },
}

pub fn index_form(model: &IndexModel<'_>) -> Result<MixedForm> {
    match model {
        IndexModel::Dirac(d) => chern_character(d.bundle()),
        IndexModel::Toeplitz { lattice, symbol } => {
            if lattice.kind() != crate::geometry::LatticeKind::Circle {
                return Err(Error::UnsupportedModel("Toeplitz models live on a circle".into()));
            }
            MixedForm::new(lattice, vec![winding_form(lattice, symbol)?])
        }
    }
}

/// Sign relating the winding of `u` to the index of its Hardy compression
/// (projection onto the nonnegative modes).
pub const HARDY_ORIENTATION: f64 = -1.0;

/// Topological Toeplitz index: oriented total winding.
pub fn topological_toeplitz_index(lattice: &Arc<Lattice>, u: &[C64]) -> Result<f64> {
    Ok(HARDY_ORIENTATION * winding_form(lattice, u)?.sum())
}

/// Cutoffs `φ_i = max(0, 1 − d(·, M_i)/w)`: 1 on `M_i`, zero from hop
/// distance `w` on, Lipschitz `1/w` per hop.
#[derive(Clone, Debug)]
pub struct CutoffFamily {
    taper: f64,
    functions: Vec<Vec<f64>>,
}

impl CutoffFamily {
    pub fn new(folner: &FolnerSequence, taper: f64) -> Result<Self> {
        if !(taper >= 1.0) {
            return Err(Error::InvalidArgument(format!("cutoff taper {taper} must be >= 1")));
        }
        let l = folner.lattice();
        let functions = folner
            .sets()
            .iter()
            .map(|set| {
                let d = l.hop_distances_from(set);
                d.iter()
                    .map(|&k| if k == usize::MAX { 0.0 } else { (1.0 - k as f64 / taper).max(0.0) })
                    .collect()
            })
            .collect();
        Ok(Self { taper, functions })
    }

    pub fn taper(&self) -> f64 {
        self.taper
    }

    pub fn function(&self, i: usize) -> &[f64] {
        &self.functions[i]
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

/// `(1/#M_i) Σ φ_i β` over top cells (or sites for a 0-form) and its limit.
pub fn pair_form_current(
    beta: &DiscreteForm,
    folner: &FolnerSequence,
    cutoffs: &CutoffFamily,
    policy: LimitPolicy,
) -> Result<TraceEstimate> {
    let l = folner.lattice();
    if **l != *beta.lattice {
        return Err(Error::ShapeMismatch("form and Følner sequence live on different lattices".into()));
    }
    if beta.degree != 0 && beta.degree != l.dim() {
        return Err(Error::DegreeMismatch(format!("cannot pair a {}-form with the fundamental class", beta.degree)));
    }
    if cutoffs.len() != folner.len() {
        return Err(Error::ShapeMismatch("cutoff family does not match the Følner sequence".into()));
    }
    let values = (0..folner.len())
        .map(|i| {
            let phi = DiscreteForm::constant(l, 0.0).with_values(cutoffs.function(i).to_vec());
            let paired = phi.wedge(beta)?;
            Ok(paired.sum() / folner.set(i).len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    TraceEstimate::from_values(values, 0.0, folner, policy)
}

impl DiscreteForm {
    fn with_values(mut self, values: Vec<f64>) -> Self {
        self.values = values;
        self
    }
}

/// Stokes bound for the pairing of an exact form `dγ` on set `i`:
/// `(2‖γ‖∞ / w) · deficiency(M_i, w + 2)`.
pub fn exact_form_certificate(gamma_sup: f64, folner: &FolnerSequence, cutoffs: &CutoffFamily, i: usize) -> Result<f64> {
    let w = cutoffs.taper();
    Ok(2.0 * gamma_sup / w * folner.deficiency(i, w + 2.0)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompactPairing {
    pub value: f64,
    pub ind_sup: f64,
    pub phi_l1: f64,
    /// `‖ind‖∞ · ‖φ‖₁`.
    pub bound: f64,
    /// Summation rounding admitted on top of `bound`.
    pub rounding: f64,
}

/// `∫ ind ∧ φ` for compactly supported `φ`, with the continuity certificate
/// `|value| ≤ ‖ind‖∞ ‖φ‖₁` enforced.
pub fn pair_compact(ind: &MixedForm, phi: &DiscreteForm) -> Result<CompactPairing> {
    let l = ind.lattice();
    if **l != *phi.lattice {
        return Err(Error::ShapeMismatch("form and index form live on different lattices".into()));
    }
    for (i, verts) in phi.cells() {
        if phi.values[i] != 0.0 {
            if let Some(&b) = verts.iter().find(|&&v| l.is_boundary(v)) {
                return Err(Error::SupportTouchesBoundary(b));
            }
        }
    }
    let complement = ind.part_or_zero(l.dim() - phi.degree)?;
    let top = complement.wedge(phi)?;
    let value = top.sum();
    let ind_sup = complement.sup_norm();
    let phi_l1 = phi.l1_norm();
    let bound = ind_sup * phi_l1;
    let terms = top.values.len() + phi.values.len();
    let rounding = 4.0 * terms as f64 * f64::EPSILON * bound;
    if !(value.abs() <= bound + rounding) {
        return Err(Error::ContinuityViolation { value, bound });
    }
    Ok(CompactPairing { value, ind_sup, phi_l1, bound, rounding })
}

/// Følner average of the top part of `ch(u) ∧ ind(model)`: plain box
/// averages over the plaquettes based in each set, or the cutoff pairing
/// when `cutoffs` is given. Exact on an exhaustive (torus) sequence.
pub fn topological_index_density(
    u: &GaugeBundle,
    model: &GradedOperator,
    folner: &FolnerSequence,
    cutoffs: Option<&CutoffFamily>,
    policy: LimitPolicy,
) -> Result<TraceEstimate> {
    if **u.lattice() != **model.lattice() || **u.lattice() != **folner.lattice() {
        return Err(Error::ShapeMismatch("bundle, model and Følner sequence must share a lattice".into()));
    }
    let integrand = chern_character(u)?.wedge(&index_form(&IndexModel::Dirac(model))?)?.top()?;
    match cutoffs {
        Some(c) => pair_form_current(&integrand, folner, c, policy),
        None => {
            let values = folner
                .sets()
                .iter()
                .map(|set| set.iter().map(|&s| integrand.values[s]).sum::<f64>() / set.len() as f64)
                .collect();
            TraceEstimate::from_values(values, 0.0, folner, policy)
        }
    }
}

/// Flux `φ` expressed as a density per plaquette, `φ / 2π`.
pub fn flux_density(flux: f64) -> f64 {
    flux / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_lattice, folner_boxes, GeometrySpec};
    use crate::models::{magnetic_dirac, winding_symbol, DiracStencil};

    fn lat(spec: GeometrySpec) -> Arc<Lattice> {
        Arc::new(build_lattice(&spec).unwrap())
    }

    #[test]
    fn curvature_of_uniform_flux() {
        let l = lat(GeometrySpec::torus(12));
        let triv = plaquette_curvature(&GaugeBundle::trivial(&l, 1)).unwrap();
        assert!(triv.values().iter().all(|&v| v == 0.0));
        let e = GaugeBundle::flux_quanta(&l, 1).unwrap();
        let f = plaquette_curvature(&e).unwrap();
        let phi = TAU / 144.0;
        assert!(f.values().iter().all(|v| (v - phi).abs() < 1e-12));
        assert!((f.sum() - TAU).abs() < 1e-10);
        let ch = chern_character(&GaugeBundle::flux_quanta(&l, 2).unwrap()).unwrap();
        assert!((ch.part(2).unwrap().sum() - 2.0).abs() < 1e-10);
        assert!(ch.part(0).unwrap().values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn half_flux_is_a_branch_ambiguity() {
        let l = lat(GeometrySpec::plane(4));
        let e = GaugeBundle::uniform_flux(&l, PI).unwrap();
        assert!(matches!(plaquette_curvature(&e), Err(Error::BranchAmbiguity { .. })));
    }

    #[test]
    fn d_squared_vanishes_on_dyadic_data() {
        let l = lat(GeometrySpec::plane(6));
        let f = DiscreteForm::from_fn(&l, 0, |s| ((s * 37) % 11) as f64 * 0.125).unwrap();
        let dd = f.d().unwrap().d().unwrap();
        assert!(dd.values().iter().all(|&v| v == 0.0));
        assert!(dd.d().is_err());
    }

    #[test]
    fn one_forms_are_antisymmetric() {
        let l = lat(GeometrySpec::torus(4));
        let w = DiscreteForm::from_fn(&l, 1, |i| i as f64).unwrap();
        for x in 0..l.len() {
            for y in l.neighbors(x) {
                assert_eq!(w.hop_value(x, y).unwrap(), -w.hop_value(y, x).unwrap());
            }
        }
    }

    #[test]
    fn winding_form_counts_windings() {
        let l = lat(GeometrySpec::circle(64));
        for k in -3..=3 {
            let w = winding_form(&l, &winding_symbol(64, k)).unwrap();
            assert!((w.sum() - k as f64).abs() < 1e-12);
            assert!((topological_toeplitz_index(&l, &winding_symbol(64, k)).unwrap() + k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_topological_density() {
        let l = lat(GeometrySpec::torus(8));
        let d = magnetic_dirac(&l, TAU * 2.0 / 64.0, DiracStencil::default()).unwrap();
        let u = GaugeBundle::flux_quanta(&l, 1).unwrap();
        let whole = FolnerSequence::whole(l.clone());
        let t = topological_index_density(&u, &d, &whole, None, LimitPolicy::default()).unwrap();
        assert!((t.value().unwrap() * 64.0 - 3.0).abs() < 1e-10);
        let triv = GaugeBundle::trivial(&l, 1);
        let flat = magnetic_dirac(&l, 0.0, DiracStencil::default()).unwrap();
        assert_eq!(topological_index_density(&triv, &flat, &whole, None, LimitPolicy::default()).unwrap().value(), Some(0.0));
    }

    #[test]
    fn volume_and_constant_pairings_converge() {
        let l = lat(GeometrySpec::plane(72));
        let f = folner_boxes(&l, &[8, 16, 32, 64], 4, &[4.0]).unwrap();
        let c = CutoffFamily::new(&f, 2.0).unwrap();
        let policy = LimitPolicy::new(2, 0.05).unwrap();
        let vol = pair_form_current(&DiscreteForm::volume(&l), &f, &c, policy).unwrap();
        assert!((vol.value().unwrap() - 1.0).abs() < 0.05);
        assert!(vol.values.windows(2).all(|w| w[1] < w[0]));
        let konst = pair_form_current(&DiscreteForm::constant(&l, 3.0), &f, &c, LimitPolicy::new(2, 0.2).unwrap()).unwrap();
        assert!((konst.value().unwrap() - 3.0).abs() < 0.2);
        let one_form = DiscreteForm::zeros(&l, 1).unwrap();
        assert!(matches!(pair_form_current(&one_form, &f, &c, policy), Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn compact_pairing_certificate() {
        let l = lat(GeometrySpec::plane(12));
        let d = magnetic_dirac(&l, TAU / 16.0, DiracStencil::default()).unwrap();
        let ind = index_form(&IndexModel::Dirac(&d)).unwrap();
        let zero = DiscreteForm::zeros(&l, 0).unwrap();
        assert_eq!(pair_compact(&ind, &zero).unwrap().value, 0.0);
        let bump = DiscreteForm::from_fn(&l, 0, |s| {
            let [x, y] = l.coords(s);
            if (4..8).contains(&x) && (4..8).contains(&y) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let p = pair_compact(&ind, &bump).unwrap();
        assert!((p.value - 16.0 / 16.0).abs() < 1e-12);
        assert!(p.value.abs() <= p.bound + p.rounding);
        let edge = DiscreteForm::from_fn(&l, 0, |s| if s == 0 { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(pair_compact(&ind, &edge), Err(Error::SupportTouchesBoundary(0))));
    }
}
