//! Pairing constants between cocycle values and integer indices, fixed once
//! against the singular-value oracles and shipped as a versioned TOML file.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{even_cocycle, odd_cocycle};
use crate::error::{Error, Result};
use crate::geometry::{build_lattice, GeometrySpec};
use crate::linalg;
use crate::models::{hardy_module, toeplitz_index, winding_symbol, FredholmModule, HardySpec};
use crate::C64;

pub const CALIBRATION_SCHEMA: u32 = 1;

const SHIPPED: &str = include_str!("../../data/calibration.toml");

/// Complex numbers are stored as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub schema_version: u32,
    pub odd: OddCalibration,
    pub even: EvenCalibration,
    pub periodicity: Periodicity,
}

/// `constant · ch^{1,1}(ū, u) = index(T_u)` on the Hardy module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OddCalibration {
    pub circle_sites: usize,
    pub winding: i64,
    pub constant: [f64; 2],
}

/// `constants[m] · ch^{0,2m}(e, …, e) = index(e T₊ e)` on a random graded module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvenCalibration {
    pub half_dimension: usize,
    pub seed: u64,
    pub projection: Vec<usize>,
    pub constants: Vec<[f64; 2]>,
}

/// Ratios of pairings at consecutive `m`: `ch^{0,2}/ch^{0,0}` and `ch^{1,3}/ch^{1,1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Periodicity {
    pub even_ratio: [f64; 2],
    pub odd_ratio: [f64; 2],
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

impl Calibration {
    /// The calibration shipped with the crate.
    pub fn shipped() -> Result<Self> {
        Self::from_toml(SHIPPED)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Calibration(e.to_string()))?;
        if c.schema_version != CALIBRATION_SCHEMA {
            return Err(Error::Calibration(format!(
                "schema version {} (expected {CALIBRATION_SCHEMA})",
                c.schema_version
            )));
        }
        Ok(c)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Calibration(e.to_string()))
    }

    pub fn odd_constant(&self) -> C64 {
        complex(self.odd.constant)
    }

    pub fn even_constant(&self, m: usize) -> Result<C64> {
        self.even
            .constants
            .get(m)
            .map(|&p| complex(p))
            .ok_or_else(|| Error::Calibration(format!("no even constant for m = {m}")))
    }

    /// Largest relative deviation between two calibrations.
    pub fn max_relative_deviation(&self, other: &Self) -> f64 {
        let mut pairs = vec![
            (self.odd.constant, other.odd.constant),
            (self.periodicity.even_ratio, other.periodicity.even_ratio),
            (self.periodicity.odd_ratio, other.periodicity.odd_ratio),
        ];
        pairs.extend(self.even.constants.iter().copied().zip(other.even.constants.iter().copied()));
        let mut worst: f64 = if self.even.constants.len() == other.even.constants.len() { 0.0 } else { f64::INFINITY };
        for (a, b) in pairs {
            let (a, b) = (complex(a), complex(b));
            worst = worst.max((a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE));
        }
        worst
    }
}

/// Raw odd pairing `ch^{1,2m−1}(ū, u, …, ū, u)`, assembled from evaluations on
/// the real functions `Re u`, `Im u` by multilinearity.
pub fn odd_pairing(module: &FredholmModule, m: usize, u: &[C64]) -> Result<C64> {
    let ch = odd_cocycle(module, m)?;
    let re: Vec<C64> = u.iter().map(|z| C64::new(z.re, 0.0)).collect();
    let im: Vec<C64> = u.iter().map(|z| C64::new(z.im, 0.0)).collect();
    let slots = 2 * m;
    let mut acc = C64::new(0.0, 0.0);
    for mask in 0..(1usize << slots) {
        let mut coeff = C64::new(1.0, 0.0);
        let mut args: Vec<&[C64]> = Vec::with_capacity(slots);
        for k in 0..slots {
            if mask & (1 << k) == 0 {
                args.push(&re);
            } else {
                args.push(&im);
                // Slot k holds ū for even k and u for odd k.
                coeff *= if k % 2 == 0 { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
            }
        }
        acc += coeff * ch.evaluate(&args)?;
    }
    Ok(acc)
}

const ODD_SITES: usize = 64;
const EVEN_HALF: usize = 3;
const EVEN_SEED: u64 = 11;
const EVEN_PROJECTION: [usize; 3] = [0, 1, 3];

/// Recomputes every constant from the oracles.
pub fn calibrate() -> Result<Calibration> {
    let circle = Arc::new(build_lattice(&GeometrySpec::circle(ODD_SITES))?);
    let hardy = hardy_module(&circle, HardySpec::default())?;
    let u = winding_symbol(ODD_SITES, 1);
    let index = toeplitz_index(&u)? as f64;
    let raw1 = odd_pairing(&hardy, 1, &u)?;
    let raw2 = odd_pairing(&hardy, 2, &u)?;

    let mut rng = ChaCha8Rng::seed_from_u64(EVEN_SEED);
    let module = FredholmModule::random_graded(EVEN_HALF, &mut rng)?;
    let e: Vec<C64> =
        (0..2 * EVEN_HALF).map(|s| C64::new(if EVEN_PROJECTION.contains(&s) { 1.0 } else { 0.0 }, 0.0)).collect();
    let even_index = graded_projection_index(&module, &e)? as f64;
    let raw_even: Vec<C64> = (0..=2)
        .map(|m| {
            let args: Vec<&[C64]> = vec![&e; 2 * m + 1];
            even_cocycle(&module, m)?.evaluate(&args)
        })
        .collect::<Result<_>>()?;

    Ok(Calibration {
        schema_version: CALIBRATION_SCHEMA,
        odd: OddCalibration { circle_sites: ODD_SITES, winding: 1, constant: pair(C64::new(index, 0.0) / raw1) },
        even: EvenCalibration {
            half_dimension: EVEN_HALF,
            seed: EVEN_SEED,
            projection: EVEN_PROJECTION.to_vec(),
            constants: raw_even.iter().map(|&r| pair(C64::new(even_index, 0.0) / r)).collect(),
        },
        periodicity: Periodicity { even_ratio: pair(raw_even[1] / raw_even[0]), odd_ratio: pair(raw2 / raw1) },
    })
}

/// Index of `e T₊ e : eH₊ → eH₋` for a projection-valued function `e`, by
/// singular values.
pub(crate) fn graded_projection_index(module: &FredholmModule, e: &[C64]) -> Result<i64> {
    let eps = module.grading().ok_or_else(|| Error::Grading("graded module required".into()))?;
    let t = module.operator();
    let r = module.rank();
    let kept = |i: usize| e[i / r].re > 0.5;
    let plus: Vec<usize> = (0..t.nrows()).filter(|&i| kept(i) && eps[(i, i)].re > 0.0).collect();
    let minus: Vec<usize> = (0..t.nrows()).filter(|&i| kept(i) && eps[(i, i)].re < 0.0).collect();
    if plus.is_empty() || minus.is_empty() {
        return Ok(plus.len() as i64 - minus.len() as i64);
    }
    let block = faer::Mat::from_fn(minus.len(), plus.len(), |a, b| t[(minus[a], plus[b])]);
    linalg::fredholm_index(block.as_ref())
}
