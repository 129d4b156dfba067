use crate::error::{Error, Result};

/// How an eigenvalue enters the supertrace density for a filter `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transfer {
    /// `f(λ)`.
    Direct,
    /// Positive-chirality block of the overlap sign: `½(μ − 1) f(√(2 + 2μ))`.
    OverlapPlus,
    /// Negative-chirality block: `½(ν + 1) f(√(2 − 2ν))`.
    OverlapMinus,
}

impl Transfer {
    pub fn apply(self, f: &dyn Fn(f64) -> f64, lambda: f64) -> f64 {
        match self {
            Transfer::Direct => f(lambda),
            Transfer::OverlapPlus => 0.5 * (lambda - 1.0) * f((2.0 + 2.0 * lambda).max(0.0).sqrt()),
            Transfer::OverlapMinus => 0.5 * (lambda + 1.0) * f((2.0 - 2.0 * lambda).max(0.0).sqrt()),
        }
    }

    fn code(self) -> u8 {
        match self {
            Transfer::Direct => 0,
            Transfer::OverlapPlus => 1,
            Transfer::OverlapMinus => 2,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Transfer::Direct),
            1 => Some(Transfer::OverlapPlus),
            2 => Some(Transfer::OverlapMinus),
            _ => None,
        }
    }
}

/// Eigenvalues with per-site graded weights (`weights[s * nev + k]`).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPart {
    transfer: Transfer,
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
}

impl SpectralPart {
    pub fn new(transfer: Transfer, eigenvalues: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            if weights.is_empty() {
                return Ok(Self { transfer, eigenvalues, weights });
            }
            return Err(Error::ShapeMismatch("weights without eigenvalues".into()));
        }
        if weights.len() % eigenvalues.len() != 0 {
            return Err(Error::ShapeMismatch("weights are not a whole number of rows".into()));
        }
        Ok(Self { transfer, eigenvalues, weights })
    }

    pub fn transfer(&self) -> Transfer {
        self.transfer
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }
}

/// Filter-independent data for `x ↦ tr_s k_{f(D)}(x,x)` on a list of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDensity {
    sites: Vec<usize>,
    parts: Vec<SpectralPart>,
}

pub trait SpectralCache {
    fn load(&self, key: &str) -> Option<SpectralDensity>;
    fn store(&self, key: &str, data: &SpectralDensity) -> Result<()>;
}

const MAGIC: &[u8; 8] = b"FSDENS01";

impl SpectralDensity {
    pub fn new(sites: Vec<usize>, parts: Vec<SpectralPart>) -> Result<Self> {
        for p in &parts {
            if p.weights.len() != p.eigenvalues.len() * sites.len() {
                return Err(Error::ShapeMismatch("weights do not match the site list".into()));
            }
        }
        Ok(Self { sites, parts })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn parts(&self) -> &[SpectralPart] {
        &self.parts
    }

    /// Supertrace density at each listed site, summed in a fixed order.
    pub fn density(&self, f: &dyn Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; self.sites.len()];
        for p in &self.parts {
            let nev = p.eigenvalues.len();
            let g: Vec<f64> = p.eigenvalues.iter().map(|&l| p.transfer.apply(f, l)).collect();
            for (s, o) in out.iter_mut().enumerate() {
                let row = &p.weights[s * nev..(s + 1) * nev];
                *o += row.iter().zip(&g).map(|(w, g)| w * g).sum::<f64>();
            }
        }
        out
    }

    /// Raw little-endian encoding for the on-disk cache.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.sites.len() as u64).to_le_bytes());
        for &s in &self.sites {
            out.extend_from_slice(&(s as u64).to_le_bytes());
        }
        out.extend_from_slice(&(self.parts.len() as u64).to_le_bytes());
        for p in &self.parts {
            out.push(p.transfer.code());
            out.extend_from_slice(&(p.eigenvalues.len() as u64).to_le_bytes());
            for v in p.eigenvalues.iter().chain(&p.weights) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = || Error::Numerical("corrupt spectral cache entry".into());
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8).ok_or_else(bad)? != MAGIC {
            return Err(bad());
        }
        let nsites = r.u64().ok_or_else(bad)? as usize;
        let sites = (0..nsites).map(|_| r.u64().map(|v| v as usize)).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
        let nparts = r.u64().ok_or_else(bad)? as usize;
        let mut parts = Vec::with_capacity(nparts);
        for _ in 0..nparts {
            let transfer = Transfer::from_code(r.take(1).ok_or_else(bad)?[0]).ok_or_else(bad)?;
            let nev = r.u64().ok_or_else(bad)? as usize;
            let eigenvalues = (0..nev).map(|_| r.f64()).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
            let weights = (0..nev * nsites).map(|_| r.f64()).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
            parts.push(SpectralPart::new(transfer, eigenvalues, weights)?);
        }
        if r.pos != bytes.len() {
            return Err(bad());
        }
        Self::new(sites, parts)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n)?;
        self.pos += n;
        Some(s)
    }

    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }

    fn f64(&mut self) -> Option<f64> {
        Some(f64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bytes_round_trip() {
        let d = SpectralDensity::new(
            vec![3, 5],
            vec![
                SpectralPart::new(Transfer::Direct, vec![-1.0, 0.5], vec![0.1, 0.2, 0.3, -0.4]).unwrap(),
                SpectralPart::new(Transfer::OverlapMinus, vec![0.25], vec![1.0, f64::MIN_POSITIVE]).unwrap(),
            ],
        )
        .unwrap();
        let back = SpectralDensity::from_bytes(&d.to_bytes()).unwrap();
        assert_eq!(back, d);
        assert!(SpectralDensity::from_bytes(&d.to_bytes()[..20]).is_err());
    }

    #[test]
    fn transfer_functions_at_the_ends() {
        let f = |x: f64| (-x * x).exp();
        // μ = 1 contributes nothing on the plus side; ν = −1 nothing on the minus side.
        assert_eq!(Transfer::OverlapPlus.apply(&f, 1.0), 0.0);
        assert_eq!(Transfer::OverlapMinus.apply(&f, -1.0), 0.0);
        // μ = −1 is a zero mode: weight −f(0).
        assert_eq!(Transfer::OverlapPlus.apply(&f, -1.0), -1.0);
        assert_eq!(Transfer::OverlapMinus.apply(&f, 1.0), 1.0);
    }
}
