//! Streaming estimators, goodness-of-fit tests and experiment drivers.

pub mod experiments;
pub mod gof;
pub mod moments;

pub use experiments::{
    clt_experiment, lil_tracker, phi, q_positive_clt_experiment, scaled_moments_experiment,
    CltNormalization, CltOutcome, LilNormalizer, LilTrackerState, QPositiveOutcome, ScaledMoment,
    LIL_MIN_CHECKPOINTS, MIN_HORIZON_RATIO,
};
pub use gof::{
    chi_square_gof, kolmogorov_survival, ks_normal, normal_cdf, ChiSquareResult, KsResult,
};
pub use moments::{merge_moments, StreamMoments};
