//! One pipeline per subcommand: geometry → model → filter → traces → forms →
//! comparison.

use std::f64::consts::TAU;
use std::sync::Arc;

use folner_core::chern_weil::{flux_density, topological_index_density, topological_toeplitz_index, CutoffFamily};
use folner_core::cocycles::{alpha_current, calibrate, coboundary, even_cocycle, hochschild_b, odd_cocycle, odd_pairing, Calibration, CyclicCochain, Parity};
use folner_core::functional::{FilterFunction, FilterMethod};
use folner_core::geometry::{
    build_colored_cover, build_lattice, folner_boxes, greedy_coloring, hop_lipschitz, max_degree, partition_of_unity,
    ColoredCover, FolnerSequence, Lattice, LatticeKind, PartitionOfUnity,
};
use folner_core::models::{
    hardy_module, magnetic_dirac, toeplitz_index, twist_by_bundle, winding_symbol, FredholmModule, GaugeBundle, GradedOperator,
    HardySpec, SpectralCache,
};
use folner_core::operator::{Block, FinitePropOperator};
use folner_core::symbols::{assemble_updo, ellipticity_check, symbol_estimate, SymbolField, SymbolRegime};
use folner_core::trace::{analytic_index_density, analytic_index_density_direct, TraceEstimate};
use folner_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::cache::DiskCache;
use crate::config::{ConfigError, MethodKind, Scenario};
use crate::report::{finite, Criterion, Report, SetRow, Timings, REPORT_SCHEMA};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteKind {
    VerifyTorus,
    VerifyPlane,
    VerifyToeplitz,
    CocycleSuite,
    CoverSuite,
    UpdoSuite,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::VerifyTorus => "verify-torus",
            SuiteKind::VerifyPlane => "verify-plane",
            SuiteKind::VerifyToeplitz => "verify-toeplitz",
            SuiteKind::CocycleSuite => "cocycle-suite",
            SuiteKind::CoverSuite => "cover-suite",
            SuiteKind::UpdoSuite => "updo-suite",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] folner_core::Error),
}

pub struct Context<'a> {
    pub scenario: &'a Scenario,
    pub seed: u64,
    pub config_sha256: String,
    pub cache: Option<&'a DiskCache>,
}

/// Core failures caused by a config value are reported against that field.
fn cfg<T>(field: &str, r: folner_core::Result<T>) -> Result<T, RunError> {
    r.map_err(|e| RunError::Config(ConfigError::new(field, e.to_string())))
}

fn require(ok: bool, field: &str, message: &str) -> Result<(), RunError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(field, message).into())
    }
}

pub fn run_suite(kind: SuiteKind, ctx: &Context<'_>, timings: &mut Timings) -> Result<Report, RunError> {
    let mut report = match kind {
        SuiteKind::VerifyTorus => verify_torus(ctx, timings)?,
        SuiteKind::VerifyPlane => verify_plane(ctx, timings)?,
        SuiteKind::VerifyToeplitz => verify_toeplitz(ctx, timings)?,
        SuiteKind::CocycleSuite => cocycle_suite(ctx, timings)?,
        SuiteKind::CoverSuite => cover_suite(ctx, timings)?,
        SuiteKind::UpdoSuite => updo_suite(ctx, timings)?,
    };
    report.suite = kind.name().into();
    report.passed = report.criteria.iter().all(|c| c.passed);
    Ok(report)
}

fn blank(ctx: &Context<'_>) -> Report {
    Report {
        schema_version: REPORT_SCHEMA,
        suite: String::new(),
        scenario: ctx.scenario.name.clone(),
        seed: ctx.seed,
        config_sha256: ctx.config_sha256.clone(),
        passed: false,
        analytic: None,
        topological: None,
        oracle: None,
        diff: None,
        criteria: Vec::new(),
        sets: Vec::new(),
        details: json!({}),
        calibration: None,
    }
}

fn lattice(s: &Scenario) -> Result<Arc<Lattice>, RunError> {
    Ok(Arc::new(cfg("geometry", build_lattice(&s.geometry))?))
}

fn analytic(ctx: &Context<'_>, d: &GradedOperator, folner: &FolnerSequence) -> Result<TraceEstimate, RunError> {
    let s = ctx.scenario;
    let f = FilterFunction::gaussian(s.filter.t);
    let est = match s.filter.method {
        MethodKind::Spectral => {
            analytic_index_density(d, &f, folner, s.limit, ctx.cache.map(|c| c as &dyn SpectralCache))?
        }
        MethodKind::Eigen => analytic_index_density_direct(d, &f, FilterMethod::Eigen, folner, s.limit)?,
        MethodKind::Chebyshev => {
            let method = FilterMethod::Chebyshev { cap: s.filter.degree_cap, target: s.filter.target };
            analytic_index_density_direct(d, &f, method, folner, s.limit)?
        }
    };
    Ok(est)
}

fn biased(s: &Scenario, v: f64) -> f64 {
    v * (1.0 + s.debug.analytic_bias)
}

fn rows(folner: &FolnerSequence, a: &[f64], t: &[f64], oracle: f64) -> Result<Vec<SetRow>, RunError> {
    (0..folner.len())
        .map(|i| {
            Ok(SetRow {
                set_index: i,
                set_size: folner.set(i).len(),
                deficiency_r2: folner.deficiency(i, 2.0)?,
                analytic_density: a[i],
                topological_density: t[i],
                oracle_density: oracle,
                abs_diff: (a[i] - t[i]).abs(),
            })
        })
        .collect()
}

fn verify_torus(ctx: &Context<'_>, timings: &mut Timings) -> Result<Report, RunError> {
    let s = ctx.scenario;
    require(s.geometry.kind == LatticeKind::Torus, "geometry.kind", "verify-torus needs a torus")?;
    let l = lattice(s)?;
    let area = l.len() as f64;
    let flux = match (s.model.flux, s.model.flux_quanta) {
        (Some(f), _) => f,
        (None, q) => TAU * q.unwrap_or(1) as f64 / area,
    };
    let d = cfg("model.flux", magnetic_dirac(&l, flux, s.model.stencil))?;
    let u = match s.model.twist_quanta {
        Some(k) => cfg("model.twist_quanta", GaugeBundle::flux_quanta(&l, k))?,
        None => GaugeBundle::trivial(&l, 1),
    };
    let model = match s.model.twist_quanta {
        Some(_) => twist_by_bundle(&d, &u)?,
        None => d.clone(),
    };
    let whole = FolnerSequence::whole(l.clone());

    let est = timings.record("analytic", || analytic(ctx, &model, &whole))?;
    let a: Vec<f64> = est.values.iter().map(|&v| biased(s, v)).collect();
    let topo = timings.record("topological", || topological_index_density(&u, &d, &whole, None, s.limit))?;
    let index = timings.record("oracle", || model.index())?;
    let (kplus, kminus) = model.kernel_dimensions()?;
    let oracle = index as f64 / area;

    let tol = s.tolerances.absolute;
    let mut r = blank(ctx);
    r.analytic = finite(a[0]);
    r.topological = finite(topo.values[0]);
    r.oracle = finite(oracle);
    r.diff = finite((a[0] - topo.values[0]).abs());
    r.criteria = vec![
        Criterion::at_most("analytic_vs_topological", (a[0] - topo.values[0]).abs(), tol),
        Criterion::at_most("analytic_vs_oracle", (a[0] - oracle).abs(), tol),
        Criterion::at_most("topological_vs_oracle", (topo.values[0] - oracle).abs(), tol),
    ];
    r.sets = rows(&whole, &a, &topo.values, oracle)?;
    r.details = json!({
        "geometry": s.geometry,
        "stencil": s.model.stencil,
        "filter": s.filter,
        "flux_per_plaquette": flux,
        "flux_quanta": flux * area / TAU,
        "twist_quanta": s.model.twist_quanta,
        "index": index,
        "kernel_dimensions": [kplus, kminus],
        "densities_times_volume": {
            "analytic": a[0] * area,
            "topological": topo.values[0] * area,
        },
    });
    Ok(r)
}

fn verify_plane(ctx: &Context<'_>, timings: &mut Timings) -> Result<Report, RunError> {
    let s = ctx.scenario;
    require(
        s.geometry.kind == LatticeKind::PlaneWindow && s.geometry.extent.len() == 2,
        "geometry.kind",
        "verify-plane needs a two-dimensional plane-window",
    )?;
    require(s.model.flux_quanta.is_none(), "model.flux_quanta", "flux quanta need a periodic geometry; give model.flux")?;
    require(s.model.twist_quanta.is_none(), "model.twist_quanta", "twisting is only supported on the torus")?;
    let fs = s.folner()?;
    let l = lattice(s)?;
    let flux = s.model.flux.unwrap_or(TAU / 16.0);
    let folner = cfg("folner.schedule", folner_boxes(&l, &fs.schedule, fs.margin, &fs.radii))?;
    let cutoffs = cfg("folner.taper", CutoffFamily::new(&folner, fs.taper))?;
    let d = cfg("model.flux", magnetic_dirac(&l, flux, s.model.stencil))?;

    let est = timings.record("analytic", || analytic(ctx, &d, &folner))?;
    let a: Vec<f64> = est.values.iter().map(|&v| biased(s, v)).collect();
    let topo = timings.record("topological", || {
        topological_index_density(&GaugeBundle::trivial(&l, 1), &d, &folner, Some(&cutoffs), s.limit)
    })?;
    let oracle = flux_density(flux);
    let t = &topo.values;

    let (abs, rel) = (s.tolerances.absolute, s.tolerances.relative);
    let mut criteria = Vec::new();
    if oracle.abs() > abs {
        let worst = a.iter().map(|v| (v - oracle).abs() / oracle.abs()).fold(0.0, f64::max);
        criteria.push(Criterion::at_most("analytic_vs_oracle_relative", worst, rel));
    } else {
        let worst = a.iter().map(|v| (v - oracle).abs()).fold(0.0, f64::max);
        criteria.push(Criterion::at_most("analytic_vs_oracle", worst, abs));
    }
    let diffs: Vec<f64> = a.iter().zip(t).map(|(x, y)| (x - y).abs()).collect();
    if diffs.len() >= 2 {
        // Differences already below the absolute tolerance count as converged.
        let ratio = diffs
            .windows(2)
            .map(|w| if w[1] <= abs && w[0] <= abs { 0.0 } else { w[1] / w[0] })
            .fold(0.0, f64::max);
        criteria.push(Criterion::below("analytic_vs_topological_shrink_ratio", ratio, 1.0));
    }
    let spread = est.limit.spread() * (1.0 + s.debug.analytic_bias).abs();
    criteria.push(Criterion::at_most("analytic_limit_spread", spread, s.limit.tolerance));

    let last = a.len() - 1;
    let mut r = blank(ctx);
    r.analytic = est.value().map(|v| biased(s, v)).and_then(finite);
    r.topological = topo.value().and_then(finite);
    r.oracle = finite(oracle);
    r.diff = finite(diffs[last]);
    r.criteria = criteria;
    r.sets = rows(&folner, &a, t, oracle)?;
    r.details = json!({
        "geometry": s.geometry,
        "stencil": s.model.stencil,
        "filter": s.filter,
        "flux_per_plaquette": flux,
        "folner": fs,
        "limit_policy": s.limit,
        "analytic_limit": est.limit,
        "topological_limit": topo.limit,
        "deficiency_table": folner.radii().iter().map(|&rad| {
            Ok(json!({ "r": rad, "deficiencies": folner.deficiency_column(rad)? }))
        }).collect::<Result<Vec<_>, folner_core::Error>>()?,
    });
    Ok(r)
}

fn verify_toeplitz(ctx: &Context<'_>, timings: &mut Timings) -> Result<Report, RunError> {
    let s = ctx.scenario;
    require(s.geometry.kind == LatticeKind::Circle, "geometry.kind", "verify-toeplitz needs a circle")?;
    let l = lattice(s)?;
    let windings = if s.model.windings.is_empty() { (-3..=3).collect() } else { s.model.windings.clone() };
    let max_winding = windings.iter().map(|k| k.unsigned_abs() as usize).max().unwrap_or(1).max(1);
    let hardy = cfg("model.windings", hardy_module(&l, HardySpec { max_winding, trace_window: None }))?;
    let cal = Calibration::shipped()?;

    let mut table = Vec::new();
    let (mut worst_pair, mut worst_topo, mut worst_imag): (f64, f64, f64) = (0.0, 0.0, 0.0);
    timings.record("windings", || -> Result<(), RunError> {
        for &k in &windings {
            let u = winding_symbol(l.len(), k);
            let index = toeplitz_index(&u)?;
            let topo = topological_toeplitz_index(&l, &u)?;
            let z = cal.odd_constant() * odd_pairing(&hardy, 1, &u)?;
            let paired = biased(s, z.re);
            worst_pair = worst_pair.max((paired - index as f64).abs());
            worst_topo = worst_topo.max((topo - index as f64).abs());
            worst_imag = worst_imag.max(z.im.abs());
            table.push(json!({
                "winding": k,
                "oracle": index,
                "topological": topo,
                "analytic": paired,
                "analytic_imaginary": z.im,
                "diff": (paired - index as f64).abs(),
            }));
        }
        Ok(())
    })?;

    let tol = s.tolerances.absolute;
    let mut r = blank(ctx);
    r.diff = finite(worst_pair);
    r.criteria = vec![
        Criterion::at_most("pairing_vs_index", worst_pair, tol),
        Criterion::at_most("topological_vs_index", worst_topo, tol),
        Criterion::at_most("pairing_imaginary_part", worst_imag, tol),
    ];
    r.details = json!({ "geometry": s.geometry, "windings": table });
    r.calibration = Some(cal);
    Ok(r)
}

fn unit_disk(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::from_polar(rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU))).collect()
}

fn cocycle_suite(ctx: &Context<'_>, timings: &mut Timings) -> Result<Report, RunError> {
    let s = ctx.scenario;
    let spec = &s.cocycles;
    let n = 2 * spec.half_dimension;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let (mut cyc, mut hoch, mut alpha): (f64, f64, f64) = (0.0, 0.0, 0.0);
    timings.record("identities", || -> Result<(), RunError> {
        for _ in 0..spec.modules {
            let graded = FredholmModule::random_graded(spec.half_dimension, &mut rng)?;
            let ungraded = FredholmModule::random_ungraded(n, &mut rng)?;
            let mut cochains = Vec::new();
            for m in 0..=spec.max_m {
                cochains.push(even_cocycle(&graded, m)?);
            }
            for m in 1..=spec.max_m {
                cochains.push(odd_cocycle(&ungraded, m)?);
            }
            for phi in &cochains {
                let fs: Vec<Vec<C64>> = (0..=phi.arity()).map(|_| unit_disk(&mut rng, n)).collect();
                let refs: Vec<&[C64]> = fs.iter().map(Vec::as_slice).collect();
                cyc = cyc.max(phi.cyclic_defect(&refs[..phi.arity()])?.norm());
                hoch = hoch.max(hochschild_b(phi, &refs)?.norm());
            }
            let w = unit_disk(&mut rng, n * n);
            let psi = CyclicCochain::from_fn(2, n, Parity::Odd, 1, move |a| {
                let mut acc = C64::new(0.0, 0.0);
                for x in 0..n {
                    for y in 0..n {
                        acc += w[x * n + y] * a[0][x] * a[1][y];
                    }
                }
                acc
            });
            let fs: Vec<Vec<C64>> = (0..3).map(|_| unit_disk(&mut rng, n)).collect();
            alpha = alpha.max(alpha_current(&coboundary(&psi), &fs[0], &[&fs[1], &fs[2]])?.norm());
        }
        Ok(())
    })?;

    let tol = s.tolerances.absolute;
    let cal = Calibration::shipped()?;
    let mut criteria = vec![
        Criterion::at_most("cyclicity_defect", cyc, tol),
        Criterion::at_most("hochschild_coboundary", hoch, tol),
        Criterion::at_most("alpha_of_coboundary", alpha, tol),
    ];
    let rel = |z: [f64; 2], target: C64| (C64::new(z[0], z[1]) - target).norm() / target.norm();
    criteria.push(Criterion::at_most("even_periodicity_ratio", rel(cal.periodicity.even_ratio, C64::new(0.0, -TAU)), tol));
    criteria.push(Criterion::at_most(
        "odd_periodicity_ratio",
        rel(cal.periodicity.odd_ratio, C64::new(0.0, -12.0 * TAU)),
        tol,
    ));
    if spec.recalibrate {
        let fresh = timings.record("recalibrate", calibrate)?;
        criteria.push(Criterion::at_most("calibration_reproducible", cal.max_relative_deviation(&fresh), tol));
    }
    let mut r = blank(ctx);
    r.criteria = criteria;
    r.details = json!({
        "modules": spec.modules,
        "max_m": spec.max_m,
        "module_dimension": n,
        "max_cyclicity_defect": cyc,
        "max_hochschild_coboundary": hoch,
        "max_alpha_of_coboundary": alpha,
    });
    r.calibration = Some(cal);
    Ok(r)
}

fn cover_and_pou(s: &Scenario, l: &Arc<Lattice>) -> Result<(ColoredCover, PartitionOfUnity), RunError> {
    let cover = cfg("cover.radius", build_colored_cover(l, s.cover.spacing, s.cover.radius))?;
    let pou = cfg("cover.taper", partition_of_unity(&cover, s.cover.taper))?;
    Ok((cover, pou))
}

fn conflicts(adjacency: &[Vec<usize>], colors: &[usize]) -> usize {
    adjacency.iter().enumerate().map(|(i, nb)| nb.iter().filter(|&&j| j > i && colors[i] == colors[j]).count()).sum()
}

fn cover_suite(ctx: &Context<'_>, timings: &mut Timings) -> Result<Report, RunError> {
    let s = ctx.scenario;
    let l = lattice(s)?;
    let (cover, pou) = timings.record("cover", || cover_and_pou(s, &l))?;
    let lipschitz = pou.weights().iter().map(|w| hop_lipschitz(&l, w)).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let (mut graph_conflicts, mut graph_excess) = (0usize, i64::MIN);
    timings.record("graphs", || {
        for _ in 0..s.cover.graphs {
            let n = rng.random_range(10..80);
            let radius: f64 = rng.random_range(0.05..0.35);
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.random::<f64>(), rng.random::<f64>())).collect();
            let adjacency: Vec<Vec<usize>> = (0..n)
                .map(|i| {
                    (0..n).filter(|&j| j != i && (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1) <= radius).collect()
                })
                .collect();
            let colors = greedy_coloring(&adjacency);
            graph_conflicts += conflicts(&adjacency, &colors);
            let used = colors.iter().max().map_or(0, |c| c + 1) as i64;
            graph_excess = graph_excess.max(used - max_degree(&adjacency) as i64 - 1);
        }
    });

    let tol = s.tolerances.absolute;
    let excess = cover.color_count() as i64 - cover.max_degree() as i64 - 1;
    let mut criteria = vec![
        Criterion::at_most("cover_coloring_conflicts", conflicts(cover.adjacency(), cover.colors()) as f64, 0.0),
        Criterion::at_most("cover_colors_beyond_degree_bound", excess as f64, 0.0),
        Criterion::at_most("uncovered_sites", if cover.covers_all() { 0.0 } else { 1.0 }, 0.0),
        Criterion::at_most("pou_sum_deviation", pou.max_sum_deviation(), tol),
        Criterion::at_most("pou_lipschitz_excess", (lipschitz - 1.0 / s.cover.taper).max(0.0), tol),
    ];
    if s.cover.graphs > 0 {
        criteria.push(Criterion::at_most("graph_coloring_conflicts", graph_conflicts as f64, 0.0));
        criteria.push(Criterion::at_most("graph_colors_beyond_degree_bound", graph_excess as f64, 0.0));
    }
    let mut r = blank(ctx);
    r.criteria = criteria;
    r.details = json!({
        "geometry": s.geometry,
        "cover": s.cover,
        "members": cover.members().len(),
        "colors": cover.color_count(),
        "max_degree": cover.max_degree(),
        "multiplicity": cover.multiplicity(),
        "pou_lipschitz": lipschitz,
    });
    Ok(r)
}

/// `(Tv)(x) = v(x + n)`.
fn translation(l: &Arc<Lattice>, n: [i64; 2]) -> Result<FinitePropOperator, RunError> {
    let blocks = (0..l.len()).filter_map(|x| {
        let c = l.coords(x);
        l.site_at(c[0] as i64 + n[0], c[1] as i64 + n[1]).map(|y| (x, y, Block::identity(1)))
    });
    Ok(FinitePropOperator::from_blocks(l.clone(), 1, blocks)?)
}

fn updo_suite(ctx: &Context<'_>, timings: &mut Timings) -> Result<Report, RunError> {
    let s = ctx.scenario;
    let sym = &s.symbols;
    require(
        matches!(s.geometry.kind, LatticeKind::Circle | LatticeKind::Torus),
        "geometry.kind",
        "toroidal symbols need a circle or torus",
    )?;
    let l = lattice(s)?;
    let (cover, pou) = cover_and_pou(s, &l)?;
    let terms: Vec<([i64; 2], C64)> =
        sym.terms.iter().map(|t| ([t[0] as i64, t[1] as i64], C64::new(t[2], t[3]))).collect();
    let p = SymbolField::scalar(&cover, 0.0, SymbolRegime::Toroidal, |_, xi| {
        terms.iter().map(|&(n, c)| c * C64::cis(n[0] as f64 * xi[0] + n[1] as f64 * xi.get(1).copied().unwrap_or(0.0))).sum()
    })?;
    let assembled = timings.record("assemble", || assemble_updo(&p, &cover, &pou))?;
    let mut exact = FinitePropOperator::zeros(l.clone(), 1);
    for &(n, c) in &terms {
        exact = exact.add(&translation(&l, n)?.scale(c))?;
    }
    let assembly_error = assembled.max_abs_diff(&exact);

    // Asymptotic audits run on a single-patch circle.
    let circle = Arc::new(build_lattice(&folner_core::geometry::GeometrySpec::circle(8))?);
    let audit_cover = build_colored_cover(&circle, 8, 4.0)?;
    let regime = SymbolRegime::Asymptotic { xi_max: sym.xi_max, steps: sym.steps };
    let quad = SymbolField::scalar(&audit_cover, 2.0, regime, |_, xi| C64::new(1.0 + xi[0] * xi[0], 0.0))?;
    let est = timings.record("estimate", || symbol_estimate(&quad, 0, 1))?;
    let c00 = est.constant(&[0], &[0]).unwrap_or(f64::NAN);
    let c01 = est.constant(&[0], &[1]).unwrap_or(f64::NAN);
    let divergent = est.entries.iter().filter(|e| e.divergent).count();
    let linear = SymbolField::scalar(&audit_cover, 1.0, regime, |_, xi| C64::new(xi[0], 0.0))?;
    let sine = SymbolField::scalar(&audit_cover, 0.0, regime, |_, xi| C64::new(xi[0].sin(), 0.0))?;
    let (lin, sin) = timings.record("ellipticity", || -> Result<_, RunError> {
        Ok((
            cfg("symbols.ellipticity_radius", ellipticity_check(&linear, sym.ellipticity_radius))?,
            cfg("symbols.ellipticity_radius", ellipticity_check(&sine, sym.ellipticity_radius))?,
        ))
    })?;

    let (abs, rel) = (s.tolerances.absolute, s.tolerances.relative);
    let mut r = blank(ctx);
    r.criteria = vec![
        Criterion::at_most("assembly_error", assembly_error, abs),
        Criterion::at_most("estimate_divergent_entries", divergent as f64, 0.0),
        Criterion::at_most("estimate_c00_relative", (c00 - 1.0).abs(), rel),
        Criterion::at_most("estimate_c01_relative", (c01 / 2.0 - 1.0).abs(), rel),
        Criterion::at_most("linear_inverse_constant", if lin.elliptic { lin.inverse_constant } else { f64::NAN }, 2.0),
        Criterion::at_most(
            "sine_missing_witness",
            if !sin.elliptic && sin.witness.is_some() { 0.0 } else { 1.0 },
            0.0,
        ),
    ];
    r.details = json!({
        "geometry": s.geometry,
        "patches": cover.members().len(),
        "terms": sym.terms,
        "assembly_error": assembly_error,
        "estimate": est,
        "linear_ellipticity": lin,
        "sine_ellipticity": sin,
    });
    Ok(r)
}
