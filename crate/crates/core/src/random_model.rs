//! Seeded sampling from the truncated space of random sequences where each
//! admissible `x > m` with `x mod N ∈ S` is included with probability `x^-γ`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sidon::ModSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub gamma: Rational,
    pub m: u64,
    /// Allowed residues `S`; its modulus is `N`.
    pub residues: ModSet,
    pub horizon: u64,
    pub seed: u64,
}

impl SampleConfig {
    pub fn new(gamma: Rational, m: u64, residues: ModSet, horizon: u64, seed: u64) -> Result<Self> {
        let cfg = SampleConfig {
            gamma,
            m,
            residues,
            horizon,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.gamma;
        if !(g.is_positive() && g.numer() < g.denom()) {
            return Err(Error::InvalidParameter(format!("gamma = {g} not in (0, 1)")));
        }
        if self.residues.is_empty() {
            return Err(Error::InvalidParameter("residue set is empty".into()));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        Ok(())
    }

    pub fn modulus(&self) -> u64 {
        self.residues.modulus()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SampleConfig { seed, ..self.clone() }
    }

    pub fn with_horizon(&self, horizon: u64) -> Self {
        SampleConfig {
            horizon,
            ..self.clone()
        }
    }

    pub fn is_admissible(&self, x: u64) -> bool {
        x > self.m && self.residues.contains(x)
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

/// Hex SHA-256 of `value` serialized as JSON with object keys sorted.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("config serializes");
    let canonical = serde_json::to_string(&v).expect("value serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// `x^-γ` for admissible `x`, else `0`.
pub fn inclusion_probability(x: u64, cfg: &SampleConfig) -> f64 {
    if x == 0 || !cfg.is_admissible(x) {
        return 0.0;
    }
    power_prob(x, cfg.gamma.to_f64())
}

#[inline]
pub(crate) fn power_prob(x: u64, gamma: f64) -> f64 {
    (x as f64).powf(-gamma)
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based uniform in `[0, 1)`, a pure function of `(seed, x)`.
#[inline]
pub fn uniform(seed: u64, x: u64) -> f64 {
    let h = mix64(mix64(seed ^ 0x9E37_79B9_7F4A_7C15) ^ x.wrapping_mul(0xD1B5_4A32_D192_ED03));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Strictly increasing positive integers below a declared horizon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntSeq {
    elements: Vec<u64>,
    horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    provenance: Option<SampleConfig>,
}

impl IntSeq {
    pub fn new(mut elements: Vec<u64>, horizon: u64) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.first() == Some(&0) {
            return Err(Error::Range("elements must be positive".into()));
        }
        if elements.last().is_some_and(|&x| x > horizon) {
            return Err(Error::Range(format!("element above horizon {horizon}")));
        }
        Ok(IntSeq {
            elements,
            horizon,
            provenance: None,
        })
    }

    /// A sequence whose horizon is its maximum (or 1 when empty).
    pub fn from_elements(elements: Vec<u64>) -> Result<Self> {
        let h = elements.iter().copied().max().unwrap_or(1);
        IntSeq::new(elements, h)
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn provenance(&self) -> Option<&SampleConfig> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Keeps the elements for which `keep` holds; provenance is dropped.
    pub fn filter(&self, keep: impl Fn(u64) -> bool) -> IntSeq {
        IntSeq {
            elements: self.elements.iter().copied().filter(|&x| keep(x)).collect(),
            horizon: self.horizon,
            provenance: None,
        }
    }

    /// Newline-delimited integers.
    pub fn to_lines(&self) -> String {
        let mut s = String::with_capacity(self.elements.len() * 7);
        for x in &self.elements {
            let _ = writeln!(s, "{x}");
        }
        s
    }

    pub fn from_lines(text: &str, horizon: u64) -> Result<Self> {
        let v = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<u64>().map_err(|_| Error::Parse(format!("bad integer {l:?}"))))
            .collect::<Result<Vec<_>>>()?;
        IntSeq::new(v, horizon)
    }

    /// JSON sidecar: horizon, count, config and its hash.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "horizon": self.horizon,
            "count": self.elements.len(),
            "config": self.provenance,
            "config_hash": self.provenance.as_ref().map(SampleConfig::hash),
        })
    }
}

const CHUNK: u64 = 1 << 16;

/// Includes each admissible `x <= horizon` iff `uniform(seed, x) < x^-γ`.
pub fn sample_sequence(cfg: &SampleConfig) -> Result<IntSeq> {
    cfg.validate()?;
    let gamma = cfg.gamma.to_f64();
    let start = cfg.m + 1;
    let mut elements = Vec::new();
    if start <= cfg.horizon {
        let table = cfg.residues.indicator();
        let n = cfg.modulus();
        let chunks: Vec<(u64, u64)> = (start..=cfg.horizon)
            .step_by(CHUNK as usize)
            .map(|lo| (lo, (lo + CHUNK - 1).min(cfg.horizon)))
            .collect();
        let parts: Vec<Vec<u64>> = chunks
            .par_iter()
            .map(|&(lo, hi)| {
                (lo..=hi)
                    .filter(|&x| table[(x % n) as usize] && uniform(cfg.seed, x) < power_prob(x, gamma))
                    .collect()
            })
            .collect();
        elements = parts.concat();
    }
    Ok(IntSeq {
        elements,
        horizon: cfg.horizon,
        provenance: Some(cfg.clone()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedCount {
    pub mean: f64,
    pub variance: f64,
}

/// Exact `Σ q(x)` and `Σ q(1-q)` over `x ∈ [lo, hi]`.
pub fn expected_count(cfg: &SampleConfig, lo: u64, hi: u64) -> Result<ExpectedCount> {
    if lo == 0 || hi > cfg.horizon {
        return Err(Error::Range(format!("range [{lo}, {hi}] not within [1, {}]", cfg.horizon)));
    }
    let (mut mean, mut variance) = (0.0, 0.0);
    for x in lo.max(cfg.m + 1)..=hi {
        let q = inclusion_probability(x, cfg);
        mean += q;
        variance += q * (1.0 - q);
    }
    Ok(ExpectedCount { mean, variance })
}
