use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::check_probability_open;
use crate::special::{ln_gamma, ln_gamma_ratio};

/// `a_n^{(k)} = Gamma(n + kp) / (Gamma(n) Gamma(1 + kp))` for `n = 0..=n_max`,
/// with `a_0 := 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaRatioSeq {
    order: u32,
    p: f64,
    values: Vec<f64>,
}

impl GammaRatioSeq {
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n_max(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    /// `a_n^{(k)}`; panics if `n > n_max`.
    pub fn get(&self, n: u64) -> f64 {
        self.values[n as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

pub fn gamma_ratio_seq(k: u32, p: f64, n_max: u64) -> Result<GammaRatioSeq> {
    if k == 0 {
        return Err(Error::precondition("order k must be at least 1"));
    }
    check_probability_open("p", p)?;
    if n_max == 0 {
        return Err(Error::precondition("n_max must be at least 1"));
    }
    let exponent = f64::from(k) * p;
    let mut values = Vec::with_capacity(n_max as usize + 1);
    values.push(1.0);
    values.push(1.0);
    let mut a = 1.0;
    for n in 1..n_max {
        a *= 1.0 + exponent / n as f64;
        values.push(a);
    }
    Ok(GammaRatioSeq {
        order: k,
        p,
        values,
    })
}

/// `Gamma(n + c) / (Gamma(n) Gamma(1 + c))` by the product
/// `prod_{j=1}^{n-1} (1 + c/j)`; valid for any `c > -1`.
pub fn gamma_ratio(n: u64, c: f64) -> f64 {
    debug_assert!(c > -1.0);
    let mut a = 1.0;
    for j in 1..n {
        a *= 1.0 + c / j as f64;
    }
    a
}

/// Log-gamma evaluation of the same ratio, used only as a cross-check.
pub fn gamma_ratio_lgamma(n: u64, c: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    (ln_gamma_ratio(n as f64, c) - ln_gamma(1.0 + c)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_values() {
        assert_eq!(gamma_ratio_seq(1, 0.5, 1).unwrap().get(1), 1.0);
        assert_eq!(gamma_ratio_seq(1, 0.5, 3).unwrap().get(3), 1.875);
        assert_eq!(gamma_ratio_seq(2, 0.5, 2).unwrap().get(2), 2.0);
        assert_eq!(gamma_ratio(3, 0.5), 1.875);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gamma_ratio_seq(0, 0.5, 10).is_err());
        assert!(gamma_ratio_seq(1, 0.0, 10).is_err());
        assert!(gamma_ratio_seq(1, 1.0, 10).is_err());
        assert!(gamma_ratio_seq(1, 0.5, 0).is_err());
    }

    #[test]
    fn recurrence_and_monotonicity() {
        let seq = gamma_ratio_seq(3, 0.4, 500).unwrap();
        assert_eq!(seq.get(0), 1.0);
        assert_eq!(seq.get(1), 1.0);
        for n in 1..500 {
            let expected = seq.get(n) * (1.0 + 1.2 / n as f64);
            assert!((seq.get(n + 1) - expected).abs() <= 1e-15 * expected);
            assert!(seq.get(n + 1) > seq.get(n));
        }
    }

    #[test]
    fn product_matches_log_gamma() {
        for k in 1..=6u32 {
            for &p in &[0.1, 0.5, 0.9] {
                let seq = gamma_ratio_seq(k, p, 20_000).unwrap();
                for n in (1..=20_000u64).step_by(97) {
                    let check = gamma_ratio_lgamma(n, f64::from(k) * p);
                    let rel = (seq.get(n) - check).abs() / check;
                    assert!(rel < 1e-9, "k={k} p={p} n={n} rel={rel}");
                }
            }
        }
    }
}
