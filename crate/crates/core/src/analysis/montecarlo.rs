use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::expect::q_stats;
use crate::deletion::{enumerate_family, FamilyKind, FamilySpec};
use crate::error::{Error, Result};
use crate::random_model::{sample_sequence, SampleConfig};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub target: u64,
    pub mean: f64,
    pub stderr: f64,
}

/// Family sizes per trial (rows) and target (columns). Trial `i` samples
/// with seed `cfg.seed + i`.
pub fn family_counts(
    kind: FamilyKind,
    targets: &[u64],
    cfg: &SampleConfig,
    trials: usize,
    epsilon: Option<Rational>,
) -> Result<Vec<Vec<u64>>> {
    let specs: Vec<FamilySpec> = targets
        .iter()
        .map(|&t| FamilySpec::new(kind, t, cfg.modulus(), epsilon))
        .collect::<Result<_>>()?;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let a = sample_sequence(&cfg.with_seed(cfg.seed.wrapping_add(i)))?;
            specs.iter().map(|s| Ok(enumerate_family(&a, s)?.len() as u64)).collect()
        })
        .collect()
}

/// Sample mean and standard error of `|family(A)|` per target.
pub fn monte_carlo_family_mean(
    kind: FamilyKind,
    targets: &[u64],
    cfg: &SampleConfig,
    trials: usize,
    epsilon: Option<Rational>,
) -> Result<Vec<McRow>> {
    if trials < 2 {
        return Err(Error::InvalidParameter("at least two trials are needed".into()));
    }
    let counts = family_counts(kind, targets, cfg, trials, epsilon)?;
    Ok(targets
        .iter()
        .enumerate()
        .map(|(j, &target)| {
            let xs: Vec<f64> = counts.iter().map(|row| row[j] as f64).collect();
            let (mean, sd) = mean_sd(&xs);
            McRow {
                target,
                mean,
                stderr: sd / (trials as f64).sqrt(),
            }
        })
        .collect())
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Exact `E|Q_n|` against the Monte Carlo mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QAgreement {
    pub n: u64,
    pub exact: f64,
    pub mean: f64,
    /// Standard error of the sample mean.
    pub stderr: f64,
    /// `sqrt(Var / trials)` from the exact variance.
    pub model_stderr: f64,
    pub within: bool,
}

/// Compares at `n`, sampling only up to `n` since larger elements cannot occur.
pub fn q_agreement(n: u64, cfg: &SampleConfig, trials: usize) -> Result<QAgreement> {
    let stats = q_stats(n, cfg);
    let row = monte_carlo_family_mean(FamilyKind::Q, &[n], &cfg.with_horizon(n), trials, None)?[0];
    let model_stderr = (stats.variance / trials as f64).sqrt();
    Ok(QAgreement {
        n,
        exact: stats.mean,
        mean: row.mean,
        stderr: row.stderr,
        model_stderr,
        within: (row.mean - stats.mean).abs() <= 3.0 * model_stderr,
    })
}

/// Empirical lower tail of `|Q_n|` against `exp(-μ/12)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JansonReport {
    pub n: u64,
    pub mu: f64,
    pub delta: f64,
    /// The bound applies only when `Δ < μ`.
    pub applicable: bool,
    pub trials: usize,
    /// Trials with `|Q_n(A)| <= μ/2`.
    pub low: usize,
    pub frequency: f64,
    pub bound: f64,
    /// Three binomial standard errors at the bound.
    pub slack: f64,
    pub holds: bool,
}

pub fn janson_check(n: u64, cfg: &SampleConfig, trials: usize) -> Result<JansonReport> {
    if trials < 2 {
        return Err(Error::InvalidParameter("at least two trials are needed".into()));
    }
    let stats = q_stats(n, cfg);
    let counts = family_counts(FamilyKind::Q, &[n], &cfg.with_horizon(n), trials, None)?;
    let low = counts.iter().filter(|r| r[0] as f64 <= stats.mean / 2.0).count();
    let frequency = low as f64 / trials as f64;
    let bound = (-stats.mean / 12.0).exp();
    let slack = 3.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
    let applicable = stats.delta < stats.mean;
    Ok(JansonReport {
        n,
        mu: stats.mean,
        delta: stats.delta,
        applicable,
        trials,
        low,
        frequency,
        bound,
        slack,
        holds: applicable && frequency <= bound + slack,
    })
}

/// Smallest grid point from which `Δ < μ` holds at every later grid point.
pub fn janson_threshold(cfg: &SampleConfig, grid: &[u64]) -> Option<u64> {
    let ok: Vec<bool> = grid
        .par_iter()
        .map(|&n| {
            let s = q_stats(n, cfg);
            s.mean > 0.0 && s.delta < s.mean
        })
        .collect();
    let mut first = None;
    for (i, &n) in grid.iter().enumerate().rev() {
        if !ok[i] {
            break;
        }
        first = Some(n);
    }
    first
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sidon::ModSet;

    fn cfg(m: u64, horizon: u64) -> SampleConfig {
        SampleConfig::new("7/11".parse().unwrap(), m, ModSet::full(7).unwrap(), horizon, 11).unwrap()
    }

    #[test]
    fn empty_model_gives_zero_means() {
        let c = cfg(500, 400);
        let rows = monte_carlo_family_mean(FamilyKind::U2, &[10, 20, 30], &c, 5, None).unwrap();
        assert!(rows.iter().all(|r| r.mean == 0.0 && r.stderr == 0.0));
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let c = cfg(5, 3000);
        let a = monte_carlo_family_mean(FamilyKind::T, &[200, 400], &c, 6, None).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| monte_carlo_family_mean(FamilyKind::T, &[200, 400], &c, 6, None).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn needs_two_trials() {
        assert!(monte_carlo_family_mean(FamilyKind::Q, &[100], &cfg(0, 100), 1, None).is_err());
    }

    #[test]
    fn q_mean_agrees_at_small_n() {
        let r = q_agreement(600, &cfg(10, 1), 200).unwrap();
        assert!(r.exact > 0.0);
        assert!(r.within, "{r:?}");
    }
}
