//! Numeric checks of the moment estimates: the two-variable power sums,
//! exact moments of `|Q_n(A)|`, Monte Carlo family means and pinned
//! regression constants.

mod expect;
mod montecarlo;
mod report;
mod series;

pub use expect::{exact_delta_q, exact_expectation_q, exact_variance_q, q_stats, r_stats, QStats, RStats};
pub use montecarlo::{
    family_counts, janson_check, janson_threshold, monte_carlo_family_mean, q_agreement, JansonReport, McRow,
    QAgreement,
};
pub use report::{check_lemma_ab, check_lemma_abab, log_grid, LemmaAbReport, Pins, RatioReport};
pub use series::{abab_series, sigma, sigma_f64, sigma_naive, tau, tau_f64, Accum, Certified, SumSpec};

pub mod pins;
