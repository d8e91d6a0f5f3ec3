//! Experiment drivers for the limit theorems of the laziest walk and the
//! `q > 0` central limit theorem.
//!
//! Trials fan out over rayon; per-trial values are collected in trial order
//! and reduced sequentially, so every statistic is independent of the
//! thread count.

use rayon::prelude::*;
use serde::Serialize;

use super::gof::{ks_normal, KsResult};
use super::moments::StreamMoments;
use crate::error::{Error, Result};
use crate::exact::{gamma_ratio, mean_closed_form, raw_moment};
use crate::mittag_leffler::ml_moment;
use crate::params::WalkParams;
use crate::rng::StreamKey;
use crate::walk::{simulate_counting, TrajectoryStat};

/// Smallest allowed ratio between the estimation horizon and the CLT time.
pub const MIN_HORIZON_RATIO: u64 = 100;

/// How the randomly centered deviation `H_n - w a_n` is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CltNormalization {
    /// `sqrt(w a_n)`, the scaling of the limit theorem.
    RandomNorm,
    /// `sqrt(w a_n (1 - a_n / a_N))`. With `w = H_N / a_N` estimated at a
    /// finite horizon `N`, the martingale increments after `N` are missing
    /// from the deviation, which removes a fraction `a_n / a_N` of its
    /// conditional variance. This factor tends to 1 as `N -> infinity`.
    HorizonCorrected,
    /// `sqrt(H_n (1 - a_n / a_N))`: the horizon-corrected scale with the
    /// observed position in place of `w a_n`. Asymptotically equivalent
    /// (`H_n / (w a_n) -> 1`), and the scale is known at time `n`, so the
    /// statistic has conditional mean zero given the first `n` steps.
    SelfNormalized,
}

impl CltNormalization {
    /// Statistic for one trajectory; `retained = 1 - a_n / a_N`.
    fn statistic(self, h_n: f64, centre: f64, retained: f64) -> f64 {
        let deviation = h_n - centre;
        match self {
            CltNormalization::RandomNorm => deviation / centre.sqrt(),
            CltNormalization::HorizonCorrected => deviation / (centre * retained).sqrt(),
            CltNormalization::SelfNormalized => deviation / (h_n * retained).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltOutcome {
    pub samples: Vec<f64>,
    pub ks: KsResult,
    pub moments: StreamMoments,
}

fn collect_outcome(samples: Vec<f64>) -> Result<CltOutcome> {
    let ks = ks_normal(&samples)?;
    let moments = samples.iter().copied().collect();
    Ok(CltOutcome {
        samples,
        ks,
        moments,
    })
}

/// Randomly centered and normed CLT for the laziest walk: each trial runs to
/// `horizon`, sets `w = H_N / a_N` and records
/// `(H_n - w a_n) / sqrt(w a_n)` (optionally horizon corrected).
pub fn clt_experiment(
    params: &WalkParams,
    n: u64,
    horizon: u64,
    trials: u64,
    seed: u64,
    normalization: CltNormalization,
) -> Result<CltOutcome> {
    params.require_laziest()?;
    if n == 0 {
        return Err(Error::precondition("time n must be at least 1"));
    }
    if horizon < MIN_HORIZON_RATIO * n {
        return Err(Error::precondition(format!(
            "horizon N = {horizon} must be at least {MIN_HORIZON_RATIO} n = {}",
            MIN_HORIZON_RATIO * n
        )));
    }
    let p = params.p();
    let a_n = gamma_ratio(n, p);
    let retained = 1.0 - a_n / gamma_ratio(horizon, p);
    let checkpoints = [n, horizon];
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let stat = simulate_counting(params, horizon, StreamKey::new(seed, i), &checkpoints)?;
            let h_n = stat.positions[0] as f64;
            Ok(normalization.statistic(h_n, stat.w_hat * a_n, retained))
        })
        .collect::<Result<_>>()?;
    collect_outcome(samples)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QPositiveOutcome {
    pub clt: CltOutcome,
    /// `rho (1 - rho) / (1 - 2 alpha)`.
    pub variance_rate: f64,
    pub exact_mean: f64,
}

/// Deterministically centered CLT for `q > 0`, `alpha < 1/2`:
/// `(H_n - E[H_n]) / sqrt(rho (1 - rho) n / (1 - 2 alpha))`.
pub fn q_positive_clt_experiment(
    params: &WalkParams,
    n: u64,
    trials: u64,
    seed: u64,
) -> Result<QPositiveOutcome> {
    if params.q() <= 0.0 {
        return Err(Error::precondition("requires q > 0"));
    }
    let alpha = params.alpha();
    if alpha >= 0.5 {
        return Err(Error::precondition(format!(
            "requires alpha = p - q < 1/2, got {alpha}"
        )));
    }
    let exact_mean = mean_closed_form(n, params)?;
    let rho = params.rho();
    let variance_rate = rho * (1.0 - rho) / (1.0 - 2.0 * alpha);
    let scale = (variance_rate * n as f64).sqrt();
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let stat = simulate_counting(params, n, StreamKey::new(seed, i), &[n])?;
            Ok((stat.final_position() as f64 - exact_mean) / scale)
        })
        .collect::<Result<_>>()?;
    Ok(QPositiveOutcome {
        clt: collect_outcome(samples)?,
        variance_rate,
        exact_mean,
    })
}

/// Sample moments of `H_N / N^p` against the exact finite-`N` values and the
/// Mittag-Leffler limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledMoment {
    pub k: usize,
    pub sample_mean: f64,
    pub standard_error: f64,
    /// `E[H_N^k] / N^{kp}`.
    pub exact: f64,
    /// `k! / Gamma(1 + kp)`.
    pub limit: f64,
}

impl ScaledMoment {
    pub fn z_score(&self) -> f64 {
        (self.sample_mean - self.exact) / self.standard_error
    }

    pub fn limit_rel_error(&self) -> f64 {
        (self.exact - self.limit).abs() / self.limit
    }
}

pub fn scaled_moments_experiment(
    p: f64,
    horizon: u64,
    trials: u64,
    seed: u64,
    k_max: usize,
) -> Result<Vec<ScaledMoment>> {
    let params = WalkParams::laziest(p)?;
    let scale = (horizon as f64).powf(p);
    let positions: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            simulate_counting(&params, horizon, StreamKey::new(seed, i), &[horizon])
                .map(|s| s.final_position() as f64 / scale)
        })
        .collect::<Result<_>>()?;
    (1..=k_max)
        .map(|k| {
            let acc: StreamMoments = positions.iter().map(|y| y.powi(k as i32)).collect();
            Ok(ScaledMoment {
                k,
                sample_mean: acc.mean(),
                standard_error: acc.standard_error(),
                exact: raw_moment(horizon, k, p)? / scale.powi(k as i32),
                limit: ml_moment(p, k as u32)?,
            })
        })
        .collect()
}

/// Iterated-logarithm normalizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LilNormalizer {
    /// `sqrt(2 t log log t)`
    Phi,
    /// `sqrt(2 t log |log t|)`
    PhiHat,
}

impl LilNormalizer {
    /// `None` where `log log t` is undefined or nonpositive (`t <= e`).
    pub fn eval(self, t: f64) -> Option<f64> {
        if !(t > std::f64::consts::E) {
            return None;
        }
        let inner = match self {
            LilNormalizer::Phi => t.ln().ln(),
            LilNormalizer::PhiHat => t.ln().abs().ln(),
        };
        Some((2.0 * t * inner).sqrt())
    }
}

pub fn phi(t: f64) -> Option<f64> {
    LilNormalizer::Phi.eval(t)
}

/// Running extrema of `(H_n - w a_n) / phi(w a_n)` along a trajectory.
/// Diagnostic only: the iterated-logarithm bound is approached far too
/// slowly to be certified by simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilTrackerState {
    pub normalizer: LilNormalizer,
    pub w_hat: f64,
    pub checkpoints: Vec<u64>,
    pub deviations: Vec<f64>,
    pub running_max: Vec<f64>,
    pub running_min: Vec<f64>,
}

pub const LIL_MIN_CHECKPOINTS: usize = 4;

/// Uses every checkpoint before the last with `w a_n > e`; the last
/// checkpoint defines `w` and has zero deviation by construction.
pub fn lil_tracker(stat: &TrajectoryStat, normalizer: LilNormalizer) -> Result<LilTrackerState> {
    let exponent = stat.params.alpha();
    let w = stat.w_hat;
    let last = stat.checkpoints.len() - 1;
    let mut state = LilTrackerState {
        normalizer,
        w_hat: w,
        checkpoints: Vec::new(),
        deviations: Vec::new(),
        running_max: Vec::new(),
        running_min: Vec::new(),
    };
    for (&t, &h) in stat.checkpoints[..last].iter().zip(&stat.positions[..last]) {
        let centre = w * gamma_ratio(t, exponent);
        let Some(norm) = normalizer.eval(centre) else {
            continue;
        };
        let deviation = (h as f64 - centre) / norm;
        let max = state
            .running_max
            .last()
            .map_or(deviation, |&m: &f64| m.max(deviation));
        let min = state
            .running_min
            .last()
            .map_or(deviation, |&m: &f64| m.min(deviation));
        state.checkpoints.push(t);
        state.deviations.push(deviation);
        state.running_max.push(max);
        state.running_min.push(min);
    }
    if state.checkpoints.len() < LIL_MIN_CHECKPOINTS {
        return Err(Error::precondition(format!(
            "trajectory has {} checkpoint(s) with w a_n > e; need at least {LIL_MIN_CHECKPOINTS}",
            state.checkpoints.len()
        )));
    }
    Ok(state)
}
