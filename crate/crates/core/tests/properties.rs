use std::sync::Arc;

use folner_core::chern_weil::{chern_character, DiscreteForm};
use folner_core::cocycles::{even_cocycle, odd_cocycle};
use folner_core::functional::{apply_filter, FilterFunction, FilterMethod};
use folner_core::geometry::{
    build_colored_cover, build_lattice, folner_boxes, greedy_coloring, hop_lipschitz, is_proper_coloring, max_degree,
    partition_of_unity, GeometrySpec, Lattice,
};
use folner_core::linalg;
use folner_core::models::{dirac_from_bundle, magnetic_dirac, DiracStencil, FredholmModule, GaugeBundle};
use folner_core::operator::{Block, FinitePropOperator};
use folner_core::trace::{analytic_index_density, folner_averages, LimitPolicy};
use folner_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lattice(spec: GeometrySpec) -> Arc<Lattice> {
    Arc::new(build_lattice(&spec).unwrap())
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random operator on a 1-d window with entries only for `|x − y| ≤ band`.
fn banded(l: &Arc<Lattice>, band: usize, rng: &mut ChaCha8Rng) -> FinitePropOperator {
    let n = l.len();
    let mut blocks = Vec::new();
    for x in 0..n {
        for y in x.saturating_sub(band)..(x + band + 1).min(n) {
            if rng.random_bool(0.7) {
                blocks.push((x, y, Block::scalar(1, random_c64(rng))));
            }
        }
    }
    FinitePropOperator::from_blocks(l.clone(), 1, blocks).unwrap()
}

fn dyadic_form(l: &Arc<Lattice>, degree: usize, rng: &mut ChaCha8Rng) -> DiscreteForm {
    let n = DiscreteForm::zeros(l, degree).unwrap().values().len();
    DiscreteForm::from_values(l, degree, (0..n).map(|_| rng.random_range(-64i32..64) as f64 / 8.0).collect()).unwrap()
}

fn random_form(l: &Arc<Lattice>, degree: usize, rng: &mut ChaCha8Rng) -> DiscreteForm {
    let n = DiscreteForm::zeros(l, degree).unwrap().values().len();
    DiscreteForm::from_values(l, degree, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn max_diff(a: &DiscreteForm, b: &DiscreteForm) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_metric_axioms(kind in 0usize..3, n in 3usize..9, a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let l = match kind {
            0 => lattice(GeometrySpec::torus(n)),
            1 => lattice(GeometrySpec::plane(n)),
            _ => lattice(GeometrySpec::circle(n)),
        };
        let (a, b, c) = (a % l.len(), b % l.len(), c % l.len());
        prop_assert_eq!(l.distance(a, a), 0.0);
        prop_assert_eq!(l.distance(a, b), l.distance(b, a));
        prop_assert!(a == b || l.distance(a, b) > 0.0);
        prop_assert!(l.distance(a, c) <= l.distance(a, b) + l.distance(b, c) + 1e-12);
    }

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>(), band in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = lattice(GeometrySpec::window(12));
        let a = banded(&l, band, &mut rng);
        let b = banded(&l, 2, &mut rng);
        prop_assert!(a.adjoint().adjoint().exactly_equals(&a));
        let lhs = a.compose(&b).unwrap().adjoint();
        let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn roe_trace_is_linear_and_positive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = lattice(GeometrySpec::window(60));
        let f = folner_boxes(&l, &[10, 20, 40], 4, &[2.0]).unwrap();
        let a = banded(&l, 2, &mut rng);
        let b = banded(&l, 3, &mut rng);
        let (s, t) = (random_c64(&mut rng), random_c64(&mut rng));
        let combo = a.scale(s).add(&b.scale(t)).unwrap();
        let (ta, tb, tc) = (folner_averages(&a, &f).unwrap(), folner_averages(&b, &f).unwrap(), folner_averages(&combo, &f).unwrap());
        for i in 0..f.len() {
            prop_assert!((tc[i] - (s * ta[i] + t * tb[i])).norm() < 1e-12);
        }
        let gram = a.adjoint().compose(&a).unwrap();
        for v in folner_averages(&gram, &f).unwrap() {
            prop_assert!(v.re >= 0.0 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn exterior_derivative_squares_to_zero_on_dyadic_data(seed in any::<u64>(), periodic in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = if periodic { lattice(GeometrySpec::torus(5)) } else { lattice(GeometrySpec::plane(6)) };
        let f = dyadic_form(&l, 0, &mut rng);
        prop_assert!(f.d().unwrap().d().unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wedge_is_bilinear_and_graded_commutative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = lattice(GeometrySpec::torus(5));
        let s: f64 = rng.random_range(-2.0..2.0);
        for (p, q) in [(0, 0), (0, 1), (1, 1), (0, 2)] {
            let a = random_form(&l, p, &mut rng);
            let a2 = random_form(&l, p, &mut rng);
            let b = random_form(&l, q, &mut rng);
            let lhs = a.scale(s).add(&a2).unwrap().wedge(&b).unwrap();
            let rhs = a.wedge(&b).unwrap().scale(s).add(&a2.wedge(&b).unwrap()).unwrap();
            prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
            let sign = if p * q % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!(max_diff(&a.wedge(&b).unwrap(), &b.wedge(&a).unwrap().scale(sign)) < 1e-12);
        }
    }

    #[test]
    fn chern_character_is_additive_and_multiplicative(p in -3i32..=3, q in -3i32..=3) {
        let l = lattice(GeometrySpec::plane(6));
        let (phi, psi) = (p as f64 * 0.05, q as f64 * 0.07);
        let e = GaugeBundle::uniform_flux(&l, phi).unwrap();
        let f = GaugeBundle::uniform_flux(&l, psi).unwrap();
        let (ce, cf) = (chern_character(&e).unwrap(), chern_character(&f).unwrap());
        let sum = chern_character(&e.direct_sum(&f).unwrap()).unwrap();
        let prod = chern_character(&e.tensor(&f).unwrap()).unwrap();
        let expected_sum = ce.add(&cf).unwrap();
        let expected_prod = ce.wedge(&cf).unwrap();
        for k in [0, 2] {
            prop_assert!(max_diff(&sum.part_or_zero(k).unwrap(), &expected_sum.part_or_zero(k).unwrap()) < 1e-12);
            prop_assert!(max_diff(&prod.part_or_zero(k).unwrap(), &expected_prod.part_or_zero(k).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn cocycles_are_multilinear(seed in any::<u64>(), m in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let even = FredholmModule::random_graded(3, &mut rng).unwrap();
        let odd = FredholmModule::random_ungraded(6, &mut rng).unwrap();
        let phis = [even_cocycle(&even, m).unwrap(), odd_cocycle(&odd, m + 1).unwrap()];
        for phi in &phis {
            let n = phi.arity();
            let fs: Vec<Vec<C64>> = (0..n).map(|_| (0..6).map(|_| random_c64(&mut rng)).collect()).collect();
            let g: Vec<C64> = (0..6).map(|_| random_c64(&mut rng)).collect();
            let s = random_c64(&mut rng);
            let slot = rng.random_range(0..n);
            let args = |replacement: &[C64]| -> Vec<Vec<C64>> {
                let mut a = fs.clone();
                a[slot] = replacement.to_vec();
                a
            };
            let mixed: Vec<C64> = fs[slot].iter().zip(&g).map(|(x, y)| s * x + y).collect();
            let eval = |a: &Vec<Vec<C64>>| phi.evaluate(&a.iter().map(Vec::as_slice).collect::<Vec<_>>()).unwrap();
            let lhs = eval(&args(&mixed));
            let rhs = s * eval(&fs) + eval(&args(&g));
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn partitions_of_unity(n in 8usize..20, spacing in 2usize..5, extra in 0usize..3, taper in 1.0f64..2.0) {
        let l = lattice(GeometrySpec::plane(n));
        let radius = (spacing + extra) as f64 + 1.0;
        let cover = build_colored_cover(&l, spacing, radius).unwrap();
        prop_assert!(cover.covers_all());
        prop_assert!(is_proper_coloring(cover.adjacency(), cover.colors()));
        if let Ok(pou) = partition_of_unity(&cover, taper) {
            prop_assert!(pou.max_sum_deviation() <= 1e-12);
            for w in pou.weights() {
                prop_assert!(hop_lipschitz(&l, w) <= 1.0 / taper + 1e-12);
                prop_assert!(w.iter().all(|&v| (0.0..=1.0).contains(&v)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn propagation_is_submultiplicative(seed in any::<u64>(), ra in 0usize..4, rb in 0usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = lattice(GeometrySpec::window(16));
        let a = banded(&l, ra, &mut rng);
        let b = banded(&l, rb, &mut rng);
        let ab = a.compose(&b).unwrap();
        prop_assert!(ab.propagation() <= a.propagation() + b.propagation());
        prop_assert!(a.propagation() <= ra as f64 && b.propagation() <= rb as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn greedy_coloring_of_geometric_graphs(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(5..60);
        let r: f64 = rng.random_range(0.05..0.4);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
        let adjacency: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1) <= r).collect())
            .collect();
        let colors = greedy_coloring(&adjacency);
        prop_assert!(is_proper_coloring(&adjacency, &colors));
        prop_assert!(colors.iter().max().unwrap() + 1 <= max_degree(&adjacency) + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn singular_values_are_gauge_invariant(seed in any::<u64>(), quanta in 0i64..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = lattice(GeometrySpec::torus(4));
        let e = GaugeBundle::flux_quanta(&l, quanta).unwrap();
        let g: Vec<C64> = (0..l.len()).map(|_| C64::cis(rng.random_range(0.0..std::f64::consts::TAU))).collect();
        let stencil = DiracStencil::default();
        let a = dirac_from_bundle(e.clone(), stencil).unwrap().operator().unwrap().singular_values().unwrap();
        let b = dirac_from_bundle(e.gauge_transform(&g).unwrap(), stencil).unwrap().operator().unwrap().singular_values().unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn graded_spectrum_is_symmetric(quanta in 0i64..4) {
        let l = lattice(GeometrySpec::torus(4));
        let d = magnetic_dirac(&l, std::f64::consts::TAU * quanta as f64 / 16.0, DiracStencil::default()).unwrap();
        let mut ev = linalg::hermitian_eigenvalues(d.operator().unwrap().to_dense().as_ref()).unwrap();
        ev.sort_by(f64::total_cmp);
        let n = ev.len();
        for i in 0..n {
            prop_assert!((ev[i] + ev[n - 1 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_mapping(quanta in 0i64..4, t in 0.3f64..2.0) {
        let l = lattice(GeometrySpec::torus(4));
        let d = magnetic_dirac(&l, std::f64::consts::TAU * quanta as f64 / 16.0, DiracStencil::default()).unwrap();
        let op = d.operator().unwrap();
        let f = FilterFunction::gaussian(t);
        let k = apply_filter(&op, &f, FilterMethod::Eigen).unwrap();
        let mut lhs = linalg::hermitian_eigenvalues(k.operator.to_dense().as_ref()).unwrap();
        let mut rhs: Vec<f64> =
            linalg::hermitian_eigenvalues(op.to_dense().as_ref()).unwrap().into_iter().map(|x| f.eval(x)).collect();
        lhs.sort_by(f64::total_cmp);
        rhs.sort_by(f64::total_cmp);
        for (x, y) in lhs.iter().zip(&rhs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn graded_trace_is_filter_independent(quanta in 0i64..4, t in 0.3f64..3.0) {
        let l = lattice(GeometrySpec::torus(6));
        let d = magnetic_dirac(&l, std::f64::consts::TAU * quanta as f64 / 36.0, DiracStencil::default()).unwrap();
        let whole = folner_core::FolnerSequence::whole(l.clone());
        let policy = LimitPolicy::default();
        let a = analytic_index_density(&d, &FilterFunction::gaussian(t), &whole, policy, None).unwrap().value().unwrap();
        let b = analytic_index_density(&d, &FilterFunction::gaussian(1.0), &whole, policy, None).unwrap().value().unwrap();
        prop_assert!((a - b).abs() * 36.0 < 1e-9);
    }
}
