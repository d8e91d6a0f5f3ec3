//! Goodness-of-fit: one-sample Kolmogorov-Smirnov against `N(0, 1)` and
//! Pearson's chi-square against an exact pmf.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::exact::ExactPmf;

pub const KS_MIN_SAMPLES: usize = 8;
const KOLMOGOROV_TOL: f64 = 1e-10;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
}

/// `P(K > lambda)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // theta-function form, fast for small lambda
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in (1..).step_by(2) {
            let term = (c * f64::from(k * k)).exp();
            sum += term;
            if term < KOLMOGOROV_TOL * sum {
                break;
            }
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = f64::from(k);
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < KOLMOGOROV_TOL {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Kolmogorov-Smirnov distance to the standard normal, with the asymptotic
/// p-value `P(K > sqrt(n) D)`.
pub fn ks_normal(samples: &[f64]) -> Result<KsResult> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::precondition(format!(
            "KS test needs at least {KS_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::precondition("KS samples contain NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_survival(n.sqrt() * statistic),
        samples: sorted.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of bins after pooling.
    pub bins: usize,
}

/// Pearson chi-square of a histogram over `0..` against `exact`.
///
/// Adjacent support points are pooled left to right until each pool expects
/// at least `min_bin` counts; a short tail is folded into the last pool.
pub fn chi_square_gof(
    empirical: &[u64],
    exact: &ExactPmf,
    min_bin: f64,
) -> Result<ChiSquareResult> {
    let support = exact.mass().len();
    if empirical.iter().skip(support).any(|&c| c > 0) {
        return Err(Error::precondition(
            "histogram has counts outside the support of the exact pmf",
        ));
    }
    let total: u64 = empirical.iter().sum();
    if total == 0 {
        return Err(Error::precondition("histogram is empty"));
    }
    let total = total as f64;

    let mut pools: Vec<(f64, f64)> = Vec::new();
    let (mut observed, mut expected) = (0.0, 0.0);
    for h in 0..support {
        observed += empirical.get(h).copied().unwrap_or(0) as f64;
        expected += total * exact.mass()[h];
        if expected >= min_bin {
            pools.push((observed, expected));
            observed = 0.0;
            expected = 0.0;
        }
    }
    if expected > 0.0 || observed > 0.0 {
        match pools.last_mut() {
            Some(last) => {
                last.0 += observed;
                last.1 += expected;
            }
            None => pools.push((observed, expected)),
        }
    }
    if pools.len() < 2 {
        return Err(Error::precondition(format!(
            "pooling at min_bin = {min_bin} leaves {} bin(s); need at least 2",
            pools.len()
        )));
    }
    let statistic: f64 = pools
        .iter()
        .map(|&(o, e)| {
            let d = o - e;
            d * d / e
        })
        .sum();
    let dof = pools.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("dof >= 1");
    Ok(ChiSquareResult {
        statistic,
        dof,
        p_value: dist.sf(statistic),
        bins: pools.len(),
    })
}
