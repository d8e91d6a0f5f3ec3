//! Closed forms and exact distributions.

mod cluster;
mod gamma_ratio;
mod moments;
mod pmf;

pub use cluster::{
    cluster_moment_formulas, mean_closed_form, variance_asymptotic, variance_closed_form,
    ClusterMoments, VarianceAsymptote, VarianceGrowth, HALF_GUARD,
};
pub use gamma_ratio::{gamma_ratio, gamma_ratio_lgamma, gamma_ratio_seq, GammaRatioSeq};
pub use moments::{
    closed_form_table, factorial_moment, moments_from_pmf, raw_from_factorial, raw_moment,
    raw_moment_with_limit, stirling2, MomentTable, CANCELLATION_LIMIT, DEFAULT_K_MAX,
};
pub use pmf::{
    exact_pmf, exact_pmf_path, exact_pmf_rational, exact_pmf_with_cap, pgf_pmf, pgf_pmf_with_cap,
    ExactPmf, DEFAULT_DP_CAP, DEFAULT_PGF_CAP, RATIONAL_CAP,
};
