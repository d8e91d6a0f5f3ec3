//! Mittag-Leffler moment generating function and moments.
//!
//! The Mittag-Leffler law with parameter `p in [0, 1]` has moments
//! `k! / Gamma(1 + kp)` and moment generating function
//! `E_p(lambda) = sum_k lambda^k / Gamma(1 + kp)`. It is the exponential law
//! at `p = 0`, the half-normal law at `p = 1/2` and the point mass at 1 for
//! `p = 1`.
//!
//! Some references write the Mittag-Leffler function with `Gamma(k + a)` in
//! the denominator; that is a different one-parameter family for general
//! `a`. Only the `Gamma(1 + kp)` series, which is the generating function of
//! the distribution, is implemented here.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, ln_gamma};

/// Largest `|lambda|` for which the series is evaluated.
pub const SERIES_DOMAIN: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    p: f64,
    series_tol: f64,
    max_terms: usize,
}

impl MLParams {
    pub fn new(p: f64) -> Result<Self> {
        Self::with_tolerance(p, 1e-16, 500)
    }

    pub fn with_tolerance(p: f64, series_tol: f64, max_terms: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                expected: "0 <= p <= 1",
            });
        }
        if !(series_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "series_tol",
                value: series_tol,
                expected: "a positive tolerance",
            });
        }
        Ok(Self {
            p,
            series_tol,
            max_terms,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `E_p(lambda) = sum_{k >= 0} lambda^k / Gamma(1 + kp)` for `|lambda| <= 30`.
///
/// Summation stops once a term falls below `series_tol` relative to the
/// partial sum. For `p = 0` the series is geometric and converges only for
/// `|lambda| < 1`; divergence surfaces as [`Error::NotConverged`].
pub fn ml_function(params: &MLParams, lambda: f64) -> Result<f64> {
    if !(lambda.abs() <= SERIES_DOMAIN) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            expected: "|lambda| <= 30",
        });
    }
    if lambda == 0.0 {
        return Ok(1.0);
    }
    let mut sum = 1.0;
    for k in 1..params.max_terms {
        let term = series_term(params.p, lambda, k);
        sum += term;
        if term.abs() < params.series_tol * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NotConverged(params.max_terms))
}

fn series_term(p: f64, lambda: f64, k: usize) -> f64 {
    let kf = k as f64;
    let magnitude = (kf * lambda.abs().ln() - ln_gamma(1.0 + kf * p)).exp();
    if lambda < 0.0 && k % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// The first `terms` terms of the series, without a stopping rule.
pub fn ml_partial_sum(p: f64, lambda: f64, terms: usize) -> f64 {
    if terms == 0 {
        return 0.0;
    }
    if lambda == 0.0 {
        return 1.0;
    }
    1.0 + (1..terms).map(|k| series_term(p, lambda, k)).sum::<f64>()
}

/// `k! / Gamma(1 + kp)`.
pub fn ml_moment(p: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::precondition("moment order k must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            expected: "0 <= p <= 1",
        });
    }
    let k = f64::from(k);
    Ok(gamma(1.0 + k) / gamma(1.0 + k * p))
}

/// Density of the standard half-normal law `|Z|`, `Z ~ N(0, 1)`.
///
/// With moments normalized as `k! / Gamma(1 + kp)`, the Mittag-Leffler law
/// at `p = 1/2` is that of `sqrt(2) |Z|`; see [`ml_half_pdf`].
pub fn half_normal_pdf(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            expected: "x >= 0",
        });
    }
    Ok((2.0 / PI).sqrt() * (-0.5 * x * x).exp())
}

/// Density of the Mittag-Leffler law at `p = 1/2`, `exp(-x^2 / 4) / sqrt(pi)`.
pub fn ml_half_pdf(x: f64) -> Result<f64> {
    Ok(half_normal_pdf(x / std::f64::consts::SQRT_2)? / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
        let h = (b - a) / intervals as f64;
        let mut acc = f(a) + f(b);
        for i in 1..intervals {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn function_examples() {
        let half = MLParams::new(0.5).unwrap();
        assert_eq!(ml_function(&half, 0.0).unwrap(), 1.0);
        let one = MLParams::new(1.0).unwrap();
        assert!((ml_function(&one, 1.0).unwrap() - std::f64::consts::E).abs() < 1e-14);
        let zero = MLParams::new(0.0).unwrap();
        assert!((ml_function(&zero, 0.5).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn p_one_is_the_exponential() {
        let one = MLParams::new(1.0).unwrap();
        // alternating series cancel badly for large negative arguments
        for &lambda in &[-1.0, -0.25, 0.3, 2.0, 10.0, 30.0] {
            let v = ml_function(&one, lambda).unwrap();
            let e = f64::exp(lambda);
            assert!(((v - e) / e).abs() < 1e-12, "lambda={lambda}");
        }
    }

    #[test]
    fn p_half_matches_closed_form() {
        // E_{1/2}(x) = exp(x^2) erfc(-x), reference values from mpmath
        let half = MLParams::new(0.5).unwrap();
        let reference = [
            (0.2, 1.272_602_028_483_195_7),
            (1.0, 5.008_980_080_762_283_5),
            (2.5, 1_035.814_842_972_622_9),
        ];
        for &(x, closed) in &reference {
            let v = ml_function(&half, x).unwrap();
            assert!(((v - closed) / closed).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_and_divergence() {
        let half = MLParams::new(0.5).unwrap();
        assert!(ml_function(&half, 31.0).is_err());
        assert!(ml_function(&half, f64::NAN).is_err());
        let zero = MLParams::new(0.0).unwrap();
        assert_eq!(ml_function(&zero, 1.5), Err(Error::NotConverged(500)));
        assert!(MLParams::new(1.2).is_err());
        assert!(MLParams::with_tolerance(0.5, 0.0, 10).is_err());
    }

    #[test]
    fn moment_examples() {
        assert!((ml_moment(1.0, 5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(ml_moment(0.0, 3).unwrap(), 6.0);
        assert_eq!(ml_moment(0.5, 2).unwrap(), 2.0);
        assert!(ml_moment(0.5, 0).is_err());
    }

    #[test]
    fn half_normal_examples() {
        assert!((half_normal_pdf(0.0).unwrap() - 0.797_884_560_8).abs() < 1e-10);
        assert!((half_normal_pdf(1.0).unwrap() - 0.483_941_449_0).abs() < 1e-10);
        assert!(half_normal_pdf(-0.1).is_err());
        let mass = simpson(|x| half_normal_pdf(x).unwrap(), 0.0, 10.0, 2000);
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn half_normal_moments_are_scaled_mittag_leffler_moments() {
        // E|Z|^k = 2^{k/2} Gamma((k+1)/2) / sqrt(pi) = 2^{-k/2} k! / Gamma(1 + k/2)
        for k in 1..=4 {
            let m = simpson(|x| x.powi(k) * half_normal_pdf(x).unwrap(), 0.0, 12.0, 4000);
            let target = ml_moment(0.5, k as u32).unwrap() / 2f64.powf(k as f64 / 2.0);
            assert!(((m - target) / target).abs() < 1e-8, "k={k}");
            let m = simpson(|x| x.powi(k) * ml_half_pdf(x).unwrap(), 0.0, 17.0, 6000);
            let target = ml_moment(0.5, k as u32).unwrap();
            assert!(((m - target) / target).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn derivatives_at_zero_are_moments() {
        // Richardson-extrapolated central differences of order k
        fn deriv(f: &dyn Fn(f64) -> f64, k: u32, h: f64) -> f64 {
            match k {
                1 => (f(h) - f(-h)) / (2.0 * h),
                2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
                3 => (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h),
                _ => unreachable!(),
            }
        }
        for &p in &[0.3, 0.5, 0.8] {
            let params = MLParams::new(p).unwrap();
            let f = |x: f64| ml_function(&params, x).unwrap();
            for k in 1..=3 {
                let h = 1e-3;
                let d = (4.0 * deriv(&f, k, h / 2.0) - deriv(&f, k, h)) / 3.0;
                let target = ml_moment(p, k).unwrap();
                assert!(((d - target) / target).abs() < 1e-4, "p={p} k={k} d={d}");
            }
        }
    }

    #[test]
    fn series_is_monotone_in_truncation() {
        for &lambda in &[0.5, 3.0, 8.0] {
            let sums: Vec<f64> = (1..200).map(|t| ml_partial_sum(0.6, lambda, t)).collect();
            assert!(sums.windows(2).all(|w| w[1] >= w[0]));
            let full = ml_function(&MLParams::new(0.6).unwrap(), lambda).unwrap();
            assert!((sums.last().unwrap() - full).abs() <= 1e-13 * full);
        }
    }
}
