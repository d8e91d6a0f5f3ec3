//! Mean and variance of `H_n` for `0 <= q < p < 1` through moments of
//! percolation clusters on uniform random recursive trees, and the leading
//! order of the variance.

use serde::Serialize;

use super::gamma_ratio::gamma_ratio;
use crate::error::{Error, Result};
use crate::params::{check_probability_open, WalkParams};
use crate::special::{compensated_sum, gamma};

/// `|alpha - 1/2|` below which the `alpha = 1/2` (harmonic) branch is used.
/// The two closed forms are continuous in `alpha` but the generic one divides
/// by `2 alpha - 1`.
pub const HALF_GUARD: f64 = 1e-12;

fn is_half(alpha: f64) -> bool {
    (alpha - 0.5).abs() < HALF_GUARD
}

/// `E[H_n] = rho n + (s - rho) Gamma(n + alpha) / (Gamma(1 + alpha) Gamma(n))`.
pub fn mean_closed_form(n: u64, params: &WalkParams) -> Result<f64> {
    if n == 0 {
        return Err(Error::precondition("time n must be at least 1"));
    }
    if params.alpha() <= 0.0 {
        return Err(Error::precondition(format!(
            "mean formula is implemented for alpha = p - q in (0, 1), got alpha = {}",
            params.alpha()
        )));
    }
    if n == 1 {
        return Ok(params.s());
    }
    let rho = params.rho();
    Ok(rho * n as f64 + (params.s() - rho) * gamma_ratio(n, params.alpha()))
}

/// First and second moments of open-cluster sizes under bond percolation
/// with retention probability `alpha` on a uniform random recursive tree of
/// `n` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusterMoments {
    /// `E[#C_1]`, the root cluster.
    pub mean_root: f64,
    /// `E[(#C_1)^2]`.
    pub second_root: f64,
    /// `sum_j E[(#C_j)^2]` over all clusters.
    pub sum_second: f64,
}

pub fn cluster_moment_formulas(n: u64, alpha: f64) -> Result<ClusterMoments> {
    check_probability_open("alpha", alpha)?;
    if n == 0 {
        return Err(Error::precondition("vertex count n must be at least 1"));
    }
    let a1 = gamma_ratio(n, alpha);
    let a2 = gamma_ratio(n, 2.0 * alpha);
    let nf = n as f64;
    let sum_second = if is_half(alpha) {
        nf * compensated_sum((1..=n).map(|l| 1.0 / l as f64))
    } else {
        // Gamma(n + 2a) / (Gamma(2a) Gamma(n)) = 2a * a_n(2a)
        nf / (1.0 - 2.0 * alpha) + 2.0 * alpha * a2 / (2.0 * alpha - 1.0)
    };
    Ok(ClusterMoments {
        mean_root: a1,
        second_root: 2.0 * a2 - a1,
        sum_second,
    })
}

/// `Var[H_n]` from cluster moments:
/// `rho (1 - rho) S + (1 - 2 rho)(s - rho) E[C_1^2] - (s - rho)^2 E[C_1]^2`.
pub fn variance_closed_form(n: u64, params: &WalkParams) -> Result<f64> {
    params.require_percolation_regime()?;
    let c = cluster_moment_formulas(n, params.alpha())?;
    let rho = params.rho();
    let shift = params.s() - rho;
    Ok(compensated_sum([
        rho * (1.0 - rho) * c.sum_second,
        (1.0 - 2.0 * rho) * shift * c.second_root,
        -shift * shift * c.mean_root * c.mean_root,
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceGrowth {
    /// `c n`, `alpha < 1/2`.
    Linear,
    /// `c n log n`, `alpha = 1/2`.
    NLogN,
    /// `c n^{2 alpha}`, `alpha > 1/2`.
    #[serde(rename = "power_2alpha")]
    Power2Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceAsymptote {
    pub growth: VarianceGrowth,
    pub coefficient: f64,
    pub alpha: f64,
}

impl VarianceAsymptote {
    /// The predicted leading term at time `n`.
    pub fn leading_term(&self, n: u64) -> f64 {
        let nf = n as f64;
        match self.growth {
            VarianceGrowth::Linear => self.coefficient * nf,
            VarianceGrowth::NLogN => self.coefficient * nf * nf.ln(),
            VarianceGrowth::Power2Alpha => self.coefficient * nf.powf(2.0 * self.alpha),
        }
    }
}

/// Leading-order growth of `Var[H_n]` for `0 < q < p < 1`.
pub fn variance_asymptotic(params: &WalkParams) -> Result<VarianceAsymptote> {
    params.require_percolation_regime()?;
    if params.q() == 0.0 {
        return Err(Error::precondition(
            "variance asymptotics require q > 0; for q = 0 the position grows like n^p with a random factor",
        ));
    }
    let alpha = params.alpha();
    let rho = params.rho();
    let s = params.s();
    let spread = rho * (1.0 - rho);
    let (growth, coefficient) = if is_half(alpha) {
        (VarianceGrowth::NLogN, spread)
    } else if alpha < 0.5 {
        (VarianceGrowth::Linear, spread / (1.0 - 2.0 * alpha))
    } else {
        // E[C_1^2] ~ 2 n^{2 alpha} / Gamma(1 + 2 alpha), hence the factor 2
        // in the middle term
        let bracket = spread / ((2.0 * alpha - 1.0) * gamma(2.0 * alpha))
            + 2.0 * (1.0 - 2.0 * rho) * (s - rho) / gamma(1.0 + 2.0 * alpha)
            - (s - rho).powi(2) / gamma(1.0 + alpha).powi(2);
        (VarianceGrowth::Power2Alpha, bracket)
    };
    Ok(VarianceAsymptote {
        growth,
        coefficient,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::pmf::exact_pmf;

    #[test]
    fn mean_examples() {
        let params = WalkParams::new(0.6, 0.2, 0.37).unwrap();
        assert_eq!(mean_closed_form(1, &params).unwrap(), 0.37);
        let laziest = WalkParams::laziest(0.5).unwrap();
        assert!((mean_closed_form(3, &laziest).unwrap() - 1.875).abs() < 1e-14);
        let params = WalkParams::new(0.5, 0.25, 1.0).unwrap();
        assert!((mean_closed_form(2, &params).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn mean_rejects_nonpositive_alpha() {
        let params = WalkParams::new(0.3, 0.3, 1.0).unwrap();
        assert!(mean_closed_form(5, &params).is_err());
        assert!(mean_closed_form(0, &WalkParams::laziest(0.5).unwrap()).is_err());
    }

    #[test]
    fn cluster_examples() {
        for &alpha in &[0.1, 0.5, 0.77] {
            let c = cluster_moment_formulas(1, alpha).unwrap();
            assert!((c.mean_root - 1.0).abs() < 1e-15);
            assert!((c.second_root - 1.0).abs() < 1e-15);
            assert!((c.sum_second - 1.0).abs() < 1e-14);
        }
        let c = cluster_moment_formulas(2, 0.5).unwrap();
        assert_eq!((c.mean_root, c.second_root, c.sum_second), (1.5, 2.5, 3.0));
        assert!((cluster_moment_formulas(2, 0.3).unwrap().mean_root - 1.3).abs() < 1e-15);
        assert!(cluster_moment_formulas(5, 0.0).is_err());
        assert!(cluster_moment_formulas(5, 1.0).is_err());
    }

    #[test]
    fn harmonic_branch_is_continuous_limit() {
        let at_half = cluster_moment_formulas(200, 0.5).unwrap().sum_second;
        let near = cluster_moment_formulas(200, 0.5 + 1e-6).unwrap().sum_second;
        assert!(((at_half - near) / at_half).abs() < 1e-4);
        let guarded = cluster_moment_formulas(200, 0.5 + 1e-13)
            .unwrap()
            .sum_second;
        assert_eq!(guarded, at_half);
    }

    #[test]
    fn variance_examples() {
        for &(p, q, s) in &[(0.5, 0.25, 0.3), (0.7, 0.0, 1.0), (0.9, 0.1, 0.0)] {
            let params = WalkParams::new(p, q, s).unwrap();
            let v = variance_closed_form(1, &params).unwrap();
            assert!((v - s * (1.0 - s)).abs() < 1e-14);
        }
        // s = rho: only the cluster-sum term survives
        let params = WalkParams::new(0.5, 0.25, 1.0 / 3.0).unwrap();
        let c = cluster_moment_formulas(2, 0.25).unwrap();
        let expected = (1.0 / 3.0) * (2.0 / 3.0) * c.sum_second;
        assert!((variance_closed_form(2, &params).unwrap() - expected).abs() < 1e-14);

        let params = WalkParams::new(0.6, 0.2, 1.0).unwrap();
        let dp = exact_pmf(50, &params).unwrap().variance();
        let closed = variance_closed_form(50, &params).unwrap();
        assert!(((closed - dp) / dp).abs() < 1e-8);

        assert!(variance_closed_form(10, &WalkParams::new(0.3, 0.5, 1.0).unwrap()).is_err());
    }

    #[test]
    fn asymptote_branches() {
        let a = variance_asymptotic(&WalkParams::new(0.5, 0.25, 1.0).unwrap()).unwrap();
        assert_eq!(a.growth, VarianceGrowth::Linear);
        assert!((a.coefficient - 4.0 / 9.0).abs() < 1e-14);

        let params = WalkParams::new(0.75, 0.25, 0.2).unwrap();
        let a = variance_asymptotic(&params).unwrap();
        assert_eq!(a.growth, VarianceGrowth::NLogN);
        assert!((a.coefficient - params.rho() * (1.0 - params.rho())).abs() < 1e-15);

        let a = variance_asymptotic(&WalkParams::new(0.9, 0.1, 1.0).unwrap()).unwrap();
        assert_eq!(a.growth, VarianceGrowth::Power2Alpha);
        assert!(a.coefficient > 0.0);

        assert!(variance_asymptotic(&WalkParams::laziest(0.5).unwrap()).is_err());
    }

    #[test]
    fn power_coefficient_is_the_limit_of_the_closed_form() {
        for (p, q, s) in [(0.95, 0.15, 0.2), (0.9, 0.1, 1.0), (0.8, 0.05, 0.0)] {
            let params = WalkParams::new(p, q, s).unwrap();
            let a = variance_asymptotic(&params).unwrap();
            let n = 10_000_000;
            let ratio = variance_closed_form(n, &params).unwrap() / a.leading_term(n);
            assert!((ratio - 1.0).abs() < 1e-3, "({p},{q},{s}): {ratio}");
        }
    }
}
