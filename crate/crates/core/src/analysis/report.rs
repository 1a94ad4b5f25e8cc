use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{abab_series, sigma_f64, tau_f64};
use crate::error::{Error, Result};

/// Values normalized by a power of the scale, with their supremum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub label: String,
    /// Power of the scale multiplied into each value.
    pub exponent: f64,
    /// `(n, m)`, or `(a, b)` for the abab series.
    pub grid: Vec<(u64, u64)>,
    pub values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pinned: Option<f64>,
}

impl RatioReport {
    pub fn new(label: &str, exponent: f64, grid: Vec<(u64, u64)>, values: Vec<f64>, ratios: Vec<f64>) -> Self {
        let sup_ratio = ratios.iter().copied().fold(0.0, f64::max);
        RatioReport {
            label: label.to_string(),
            exponent,
            grid,
            values,
            ratios,
            sup_ratio,
            pinned: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.sup_ratio.is_finite() && self.ratios.iter().all(|r| r.is_finite())
    }

    /// `sup <= pinned * 1.01`, when a pin is attached.
    pub fn within_pin(&self) -> Option<bool> {
        self.pinned.map(|p| self.sup_ratio <= p * 1.01)
    }

    /// `target,m,value,normalized`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("target,m,value,normalized\n");
        for ((g, v), r) in self.grid.iter().zip(&self.values).zip(&self.ratios) {
            let _ = writeln!(s, "{},{},{:e},{:e}", g.0, g.1, v, r);
        }
        s
    }
}

/// Integers `lo..=hi`, roughly `per_decade` per factor of ten, deduplicated.
pub fn log_grid(lo: u64, hi: u64, per_decade: u32) -> Vec<u64> {
    assert!(lo >= 1 && lo <= hi && per_decade >= 1);
    let steps = ((hi as f64 / lo as f64).log10() * per_decade as f64).ceil() as u32;
    let mut v: Vec<u64> = (0..=steps)
        .map(|i| {
            let t = if steps == 0 { 0.0 } else { i as f64 / steps as f64 };
            ((lo as f64) * (hi as f64 / lo as f64).powf(t)).round() as u64
        })
        .map(|x| x.clamp(lo, hi))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Both sums of the ab lemma, normalized by `(n+m)^(α+β-1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaAbReport {
    pub sigma: RatioReport,
    pub tau: RatioReport,
}

pub fn check_lemma_ab(alpha: f64, beta: f64, ns: &[u64], ms: &[u64], tol: f64) -> Result<LemmaAbReport> {
    if alpha >= 1.0 || beta >= 1.0 || alpha + beta <= 1.0 {
        return Err(Error::NonConvergent(format!("alpha = {alpha}, beta = {beta}")));
    }
    let e = alpha + beta - 1.0;
    let grid: Vec<(u64, u64)> = ms.iter().flat_map(|&m| ns.iter().map(move |&n| (n, m))).collect();
    let rows: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&(n, m)| Ok((sigma_f64(alpha, beta, n, m), tau_f64(alpha, beta, n, m, tol)?.value)))
        .collect::<Result<_>>()?;
    let scale: Vec<f64> = grid.iter().map(|&(n, m)| ((n + m) as f64).powf(e)).collect();
    let sig: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let tau: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let norm = |v: &[f64]| v.iter().zip(&scale).map(|(a, b)| a * b).collect::<Vec<_>>();
    Ok(LemmaAbReport {
        sigma: RatioReport::new("sigma", e, grid.clone(), norm(&sig), norm(&sig)).with_values(sig),
        tau: RatioReport::new("tau", e, grid, norm(&tau), norm(&tau)).with_values(tau),
    })
}

impl RatioReport {
    fn with_values(mut self, values: Vec<f64>) -> Self {
        self.values = values;
        self
    }
}

/// Series over `(a, b)` for every pair and its reverse, normalized by
/// `(ab)^(2γ-1)`.
pub fn check_lemma_abab(gamma: f64, pairs: &[(u64, u64)], tol: f64) -> Result<RatioReport> {
    if !(gamma > 0.5 && gamma < 1.0) {
        return Err(Error::NonConvergent(format!("gamma = {gamma} outside (1/2, 1)")));
    }
    let mut grid: Vec<(u64, u64)> = pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    grid.sort_unstable();
    grid.dedup();
    if grid.iter().any(|&(a, b)| a == 0 || b == 0) {
        return Err(Error::Range("pairs must be positive".into()));
    }
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&(a, b)| Ok(abab_series(gamma, a, b, tol)?.value))
        .collect::<Result<_>>()?;
    let e = 2.0 * gamma - 1.0;
    let ratios = grid.iter().zip(&values).map(|(&(a, b), v)| v * ((a * b) as f64).powf(e)).collect();
    Ok(RatioReport::new("abab", e, grid, values, ratios))
}

/// Regression constants keyed by name. Keys ending in `_sup` are upper
/// bounds (`value <= pin * 1.01`), `_inf` lower bounds (`value >= pin / 1.01`),
/// anything else must reproduce to relative `1e-9`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Pins(pub BTreeMap<String, f64>);

impl Pins {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Pins::parse(&text)
    }

    /// Accepts the bare map or a command result carrying it as `payload`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(p) = v.get_mut("payload") {
            v = p.take();
        }
        serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pins serialize") + "\n"
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    /// `None` when the key is not pinned.
    pub fn check(&self, key: &str, value: f64) -> Option<bool> {
        let pin = self.get(key)?;
        Some(if key.ends_with("_sup") {
            value <= pin * 1.01
        } else if key.ends_with("_inf") {
            value >= pin / 1.01
        } else {
            (value - pin).abs() <= 1e-9 * pin.abs().max(1.0)
        })
    }
}
