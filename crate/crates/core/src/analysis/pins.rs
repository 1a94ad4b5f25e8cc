//! Measurement routines behind the checked-in regression constants.

use rayon::prelude::*;

use super::expect::q_stats;
use super::montecarlo::{janson_threshold, monte_carlo_family_mean};
use super::report::{check_lemma_ab, check_lemma_abab, log_grid, Pins};
use crate::curve::{dyadic_box_coverage, torus_points, QuadricParams};
use crate::decompose::{decompose3_zn, decompose4_ruzsa_with, DlogTable, SearchMode};
use crate::deletion::FamilyKind;
use crate::error::Result;
use crate::numbertheory::primitive_root;
use crate::random_model::SampleConfig;
use crate::rational::Rational;
use crate::sidon::{ruzsa_set, ModSet};

pub const MASTER_SEED: u64 = 20_240_601;
pub const TAIL_TOL: f64 = 1e-9;
pub const COVERAGE_PRIMES: [u64; 4] = [101, 499, 1009, 4999];
pub const COVERAGE_R: (u64, u64) = (3, 10);

fn gamma() -> Rational {
    Rational::new(7, 11).expect("valid")
}

/// `γ = 7/11`, `m = 100`, `S = Z_7` (every residue), horizon `10^6`.
pub fn z7_config() -> SampleConfig {
    SampleConfig::new(gamma(), 100, ModSet::full(7).expect("valid"), 1_000_000, MASTER_SEED).expect("valid")
}

/// `γ = 7/11`, `m = 100`, `S` = Ruzsa set for `p = 23`, `g = 5` in `Z_506`.
pub fn ruzsa_config() -> SampleConfig {
    SampleConfig::new(gamma(), 100, ruzsa_set(23, 5).expect("valid"), 1_000_000, MASTER_SEED).expect("valid")
}

pub fn lemma_ab_ns() -> Vec<u64> {
    log_grid(2, 100_000, 6)
}

pub const LEMMA_AB_MS: [u64; 3] = [0, 10, 100];
pub const ABAB_VALUES: [u64; 3] = [1, 10, 100];

pub fn abab_pairs() -> Vec<(u64, u64)> {
    ABAB_VALUES.iter().flat_map(|&a| ABAB_VALUES.iter().map(move |&b| (a, b))).collect()
}

pub fn moment_grid() -> Vec<u64> {
    log_grid(10_000, 1_000_000, 4)
}

pub fn janson_grid() -> Vec<u64> {
    log_grid(310, 30_000, 6)
}

pub fn t_grid() -> Vec<u64> {
    log_grid(1_000, 100_000, 2)
}

pub fn u2_grid() -> Vec<u64> {
    log_grid(100, 100_000, 2)
}

pub const MC_TRIALS: usize = 50;

/// Success fractions of `decompose3_zn` over `Z_700` in both modes.
pub fn decomposer_pins() -> Result<Vec<(String, f64)>> {
    let n = 700u64;
    let mut out = Vec::new();
    for (mode, name) in [(SearchMode::Exhaustive, "exhaustive"), (SearchMode::Box, "box")] {
        let ok = (0..n).into_par_iter().filter(|&t| decompose3_zn(t, n, mode).is_ok()).count();
        out.push((format!("decompose_n700_{name}_fraction"), ok as f64 / n as f64));
    }
    let table = DlogTable::new(13, primitive_root(13)?)?;
    let ok = (0..12u64)
        .flat_map(|a| (0..13u64).map(move |b| (a, b)))
        .filter(|&(a, b)| decompose4_ruzsa_with(&table, a, b).is_ok())
        .count();
    out.push(("decompose4_p13_fraction".into(), ok as f64 / 156.0));
    Ok(out)
}

/// Empty-box fractions at levels 1 and 2 for `(r1, r2) = (3, 10)`.
pub fn coverage_pins() -> Result<Vec<(String, f64)>> {
    let (r1, r2) = COVERAGE_R;
    let mut out = Vec::new();
    for p in COVERAGE_PRIMES {
        let qp = QuadricParams::any_prime(p, r1, r2)?;
        let cov = dyadic_box_coverage(&torus_points(&qp), 1)?;
        if p == 499 {
            out.push(("coverage_p499_empty_boxes".into(), cov.empty_boxes as f64));
        }
        out.push((format!("coverage_p{p}_empty_fraction"), cov.empty_fraction()));
        let fine = dyadic_box_coverage(&torus_points(&qp), 2)?;
        out.push((format!("coverage_p{p}_level2_empty_fraction"), fine.empty_fraction()));
    }
    Ok(out)
}

/// Supremum ratios for the two power-sum lemmas.
pub fn lemma_pins() -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let eps_gamma = Rational::gamma_for_epsilon(Rational::new(1, 2)?).to_f64();
    for (tag, a) in [("7_11", 7.0 / 11.0), ("eps_half", eps_gamma)] {
        let r = check_lemma_ab(a, a, &lemma_ab_ns(), &LEMMA_AB_MS, TAIL_TOL)?;
        out.push((format!("lemma_ab_sigma_{tag}_sup"), r.sigma.sup_ratio));
        out.push((format!("lemma_ab_tau_{tag}_sup"), r.tau.sup_ratio));
    }
    let r = check_lemma_abab(7.0 / 11.0, &abab_pairs(), TAIL_TOL)?;
    out.push(("lemma_abab_7_11_sup".into(), r.sup_ratio));
    Ok(out)
}

/// Normalized exact moments of `|Q_n|` over the Ruzsa model and the
/// `Δ < μ` threshold over the `Z_7` model.
pub fn moment_pins() -> Vec<(String, f64)> {
    let cfg = ruzsa_config();
    let g = cfg.gamma.to_f64();
    let stats: Vec<_> = moment_grid().iter().map(|&n| q_stats(n, &cfg)).collect();
    let mean_norm: Vec<f64> = stats.iter().map(|s| s.mean * (s.n as f64).powf(3.0 * g - 2.0)).collect();
    let delta_norm: Vec<f64> = stats.iter().map(|s| s.delta * (s.n as f64).powf(2.0 / 11.0)).collect();
    let n0 = janson_threshold(&z7_config(), &janson_grid()).map_or(-1.0, |n| n as f64);
    vec![
        ("q_mean_norm_inf".into(), mean_norm.iter().copied().fold(f64::INFINITY, f64::min)),
        ("q_mean_norm_sup".into(), mean_norm.iter().copied().fold(0.0, f64::max)),
        ("q_delta_norm_sup".into(), delta_norm.iter().copied().fold(0.0, f64::max)),
        ("janson_n0".into(), n0),
    ]
}

/// Normalized Monte Carlo means of `|T_n|` and `|U_{2r}|` over the `Z_7` model.
pub fn montecarlo_pins() -> Result<Vec<(String, f64)>> {
    let cfg = z7_config();
    let t = monte_carlo_family_mean(FamilyKind::T, &t_grid(), &cfg, MC_TRIALS, None)?;
    let u = monte_carlo_family_mean(FamilyKind::U2, &u2_grid(), &cfg, MC_TRIALS, None)?;
    let m = cfg.m as f64;
    let t_sup = t.iter().map(|r| r.mean * (r.target as f64 + m).powf(1.0 / 11.0)).fold(0.0, f64::max);
    let u_sup = u.iter().map(|r| r.mean * (r.target as f64 + m).powf(3.0 / 11.0)).fold(0.0, f64::max);
    Ok(vec![("mc_t_norm_sup".into(), t_sup), ("mc_u2_norm_sup".into(), u_sup)])
}

/// Every regression constant, measured from scratch.
pub fn measure_pins() -> Result<Pins> {
    let mut p = Pins::default();
    let groups = [decomposer_pins()?, coverage_pins()?, lemma_pins()?, moment_pins(), montecarlo_pins()?];
    for (k, v) in groups.into_iter().flatten() {
        p.0.insert(k, v);
    }
    Ok(p)
}
