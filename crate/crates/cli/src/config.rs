//! Scenario files: TOML with an explicit schema version; unknown keys are
//! rejected rather than ignored.

use std::path::{Path, PathBuf};

use folner_core::geometry::{GeometrySpec, LatticeKind};
use folner_core::models::DiracStencil;
use folner_core::trace::LimitPolicy;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// A configuration problem, pinned to the offending key.
#[derive(Debug, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub geometry: GeometrySpec,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub filter: FilterSpec,
    #[serde(default)]
    pub folner: Option<FolnerSpec>,
    #[serde(default)]
    pub limit: LimitPolicy,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub cocycles: CocycleSpec,
    #[serde(default)]
    pub cover: CoverSpec,
    #[serde(default)]
    pub symbols: SymbolSpec,
    #[serde(default)]
    pub debug: DebugSpec,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub stencil: DiracStencil,
    /// Flux per plaquette (radians).
    pub flux: Option<f64>,
    /// Total flux in units of 2π; periodic geometries only.
    pub flux_quanta: Option<i64>,
    /// Flux quanta of the line bundle `u` paired with the index class.
    pub twist_quanta: Option<i64>,
    #[serde(default)]
    pub windings: Vec<i64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterKind {
    #[default]
    Gaussian,
}

/// `spectral` uses the model's cached eigen-data; `eigen` and `chebyshev`
/// materialize `f(D)` explicitly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    #[default]
    Spectral,
    Eigen,
    Chebyshev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    #[serde(rename = "type", default)]
    pub kind: FilterKind,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default)]
    pub method: MethodKind,
    #[serde(default = "default_cap")]
    pub degree_cap: usize,
    #[serde(default = "default_target")]
    pub target: f64,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self { kind: FilterKind::Gaussian, t: 1.0, method: MethodKind::Spectral, degree_cap: default_cap(), target: default_target() }
    }
}

fn one() -> f64 {
    1.0
}

fn default_cap() -> usize {
    2000
}

fn default_target() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FolnerSpec {
    pub schedule: Vec<usize>,
    #[serde(default = "default_margin")]
    pub margin: usize,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Taper of the cutoff family used on the topological side.
    #[serde(default = "default_taper")]
    pub taper: f64,
}

fn default_margin() -> usize {
    4
}

fn default_radii() -> Vec<f64> {
    vec![2.0]
}

fn default_taper() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_absolute")]
    pub absolute: f64,
    /// Relative tolerance against the flux oracle on non-compact geometries.
    #[serde(default = "default_relative")]
    pub relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { absolute: default_absolute(), relative: default_relative() }
    }
}

fn default_absolute() -> f64 {
    1e-6
}

fn default_relative() -> f64 {
    0.10
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    #[default]
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSpec {
    #[serde(default = "default_modules")]
    pub modules: usize,
    #[serde(default = "default_max_m")]
    pub max_m: usize,
    #[serde(default = "default_half")]
    pub half_dimension: usize,
    /// Also recompute the calibration constants and compare with the shipped ones.
    #[serde(default = "yes")]
    pub recalibrate: bool,
}

impl Default for CocycleSpec {
    fn default() -> Self {
        Self { modules: default_modules(), max_m: default_max_m(), half_dimension: default_half(), recalibrate: true }
    }
}

fn default_modules() -> usize {
    50
}

fn default_max_m() -> usize {
    2
}

fn default_half() -> usize {
    3
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    #[serde(default = "default_spacing")]
    pub spacing: usize,
    #[serde(default = "default_cover_radius")]
    pub radius: f64,
    #[serde(default = "default_pou_taper")]
    pub taper: f64,
    /// Random geometric graphs to color.
    #[serde(default = "default_graphs")]
    pub graphs: usize,
}

impl Default for CoverSpec {
    fn default() -> Self {
        Self { spacing: default_spacing(), radius: default_cover_radius(), taper: default_pou_taper(), graphs: default_graphs() }
    }
}

fn default_spacing() -> usize {
    4
}

fn default_cover_radius() -> f64 {
    3.0
}

fn default_pou_taper() -> f64 {
    1.0
}

fn default_graphs() -> usize {
    100
}

/// Trigonometric multiplier `Σ c e^{i(a ξ₁ + b ξ₂)}`, one `[a, b, re, im]` per term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    #[serde(default = "default_terms")]
    pub terms: Vec<[f64; 4]>,
    #[serde(default = "default_xi_max")]
    pub xi_max: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Radius for the ellipticity check of the linear and sine symbols.
    #[serde(default = "one")]
    pub ellipticity_radius: f64,
}

impl Default for SymbolSpec {
    fn default() -> Self {
        Self { terms: default_terms(), xi_max: default_xi_max(), steps: default_steps(), ellipticity_radius: 1.0 }
    }
}

fn default_terms() -> Vec<[f64; 4]> {
    vec![[0.0, 0.0, 2.0, 0.0], [1.0, 0.0, 0.5, 0.25], [-2.0, 0.0, -0.3, 0.0]]
}

fn default_xi_max() -> f64 {
    64.0
}

fn default_steps() -> usize {
    64
}

/// Fault injection for exercising the failure path.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DebugSpec {
    /// Multiplies every analytic density by `1 + analytic_bias`.
    #[serde(default)]
    pub analytic_bias: f64,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("cannot read {}: {e}", path.display())))?;
        let scenario = Self::parse(&text)?;
        Ok((scenario, text))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let s: Self = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|r| key_at(text, r.start)).unwrap_or_else(|| "config".into());
            ConfigError::new(field, e.message().trim().to_string())
        })?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(ConfigError::new("name", "must not be empty"));
        }
        let g = &self.geometry;
        let dims = if matches!(g.kind, LatticeKind::Torus) { 2 } else { g.extent.len() };
        if g.extent.is_empty() || g.extent.len() > 2 || g.extent.len() != dims || g.extent.contains(&0) {
            return Err(ConfigError::new("geometry.extent", format!("invalid extent {:?} for {:?}", g.extent, g.kind)));
        }
        if !(g.spacing > 0.0) {
            return Err(ConfigError::new("geometry.spacing", "must be positive"));
        }
        positive("tolerances.absolute", self.tolerances.absolute)?;
        positive("tolerances.relative", self.tolerances.relative)?;
        positive("limit.tolerance", self.limit.tolerance)?;
        if self.limit.window < 2 {
            return Err(ConfigError::new("limit.window", "must be at least 2"));
        }
        positive("filter.t", self.filter.t)?;
        positive("filter.target", self.filter.target)?;
        if self.filter.degree_cap == 0 {
            return Err(ConfigError::new("filter.degree_cap", "must be positive"));
        }
        if self.model.flux.is_some() && self.model.flux_quanta.is_some() {
            return Err(ConfigError::new("model.flux_quanta", "give either flux or flux_quanta, not both"));
        }
        if let Some(f) = self.model.flux {
            if !f.is_finite() {
                return Err(ConfigError::new("model.flux", "must be finite"));
            }
        }
        if let DiracStencil::WilsonOverlap { mass } = self.model.stencil {
            positive("model.stencil.mass", mass)?;
        }
        if let Some(f) = &self.folner {
            if f.schedule.is_empty() {
                return Err(ConfigError::new("folner.schedule", "must not be empty"));
            }
            if f.schedule.contains(&0) || f.schedule.windows(2).any(|w| w[1] <= w[0]) {
                return Err(ConfigError::new("folner.schedule", format!("box sizes {:?} must be positive and strictly increasing", f.schedule)));
            }
            if let Some(&last) = f.schedule.last() {
                let room = g.extent.iter().copied().min().unwrap_or(0);
                if last + 2 * f.margin > room && !g.kind.is_periodic() {
                    return Err(ConfigError::new(
                        "folner.schedule",
                        format!("box {last} with margin {} does not fit in extent {room}", f.margin),
                    ));
                }
            }
            if f.radii.is_empty() || f.radii.iter().any(|r| !(*r > 0.0)) {
                return Err(ConfigError::new("folner.radii", "needs at least one positive radius"));
            }
            positive("folner.taper", f.taper)?;
        }
        if self.cocycles.max_m > 3 {
            return Err(ConfigError::new("cocycles.max_m", "at most 3 is supported"));
        }
        if self.cocycles.half_dimension == 0 {
            return Err(ConfigError::new("cocycles.half_dimension", "must be positive"));
        }
        if self.cover.spacing == 0 {
            return Err(ConfigError::new("cover.spacing", "must be positive"));
        }
        positive("cover.radius", self.cover.radius)?;
        positive("cover.taper", self.cover.taper)?;
        positive("symbols.xi_max", self.symbols.xi_max)?;
        positive("symbols.ellipticity_radius", self.symbols.ellipticity_radius)?;
        if self.symbols.steps == 0 {
            return Err(ConfigError::new("symbols.steps", "must be positive"));
        }
        if self.symbols.terms.iter().any(|t| t[0].fract() != 0.0 || t[1].fract() != 0.0) {
            return Err(ConfigError::new("symbols.terms", "frequencies must be integers"));
        }
        if !self.debug.analytic_bias.is_finite() {
            return Err(ConfigError::new("debug.analytic_bias", "must be finite"));
        }
        Ok(())
    }

    /// Schedule of the scenario, or a diagnostic naming the missing table.
    pub fn folner(&self) -> Result<&FolnerSpec, ConfigError> {
        self.folner.as_ref().ok_or_else(|| ConfigError::new("folner.schedule", "this suite needs a Følner schedule"))
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("must be positive and finite, got {v}")))
    }
}

/// Dotted key path of the TOML entry containing byte offset `at`.
fn key_at(text: &str, at: usize) -> String {
    let mut table = String::new();
    let mut key = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if offset > at {
            break;
        }
        if trimmed.starts_with('[') && !trimmed.starts_with("[[") {
            table = trimmed.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            key.clear();
        } else if let Some((k, _)) = trimmed.split_once('=') {
            if !trimmed.starts_with('#') {
                key = k.trim().to_string();
            }
        }
        offset += line.len();
    }
    match (table.is_empty(), key.is_empty()) {
        (true, _) => if key.is_empty() { "config".into() } else { key },
        (false, true) => table,
        (false, false) => format!("{table}.{key}"),
    }
}
