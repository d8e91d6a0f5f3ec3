//! Factorial and raw moments of `H_n` in the laziest case.
//!
//! `E[(H_n)_k] = k! * sum_{i=1}^k (-1)^{k-i} C(k-1, i-1) a_n^{(i)}`. The
//! alternating sum loses roughly one decimal digit per order, so orders are
//! capped: [`CANCELLATION_LIMIT`] is the hard ceiling in double precision and
//! raw moments default to [`DEFAULT_K_MAX`].

use std::sync::OnceLock;

use serde::Serialize;

use super::gamma_ratio::gamma_ratio;
use super::pmf::ExactPmf;
use crate::error::{Error, Result};
use crate::params::check_probability_open;
use crate::special::{compensated_sum, CompensatedSum};

pub const DEFAULT_K_MAX: usize = 8;
pub const CANCELLATION_LIMIT: usize = 10;

const STIRLING_ROWS: usize = 21;

/// Factorial and raw moments for orders `1..=k_max`; index 0 holds order 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub n: u64,
    pub factorial: Vec<f64>,
    pub raw: Vec<f64>,
}

impl MomentTable {
    pub fn k_max(&self) -> usize {
        self.factorial.len()
    }

    pub fn factorial_moment(&self, k: usize) -> f64 {
        self.factorial[k - 1]
    }

    pub fn raw_moment(&self, k: usize) -> f64 {
        self.raw[k - 1]
    }
}

fn stirling_table() -> &'static [Vec<u64>] {
    static TABLE: OnceLock<Vec<Vec<u64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut rows = vec![vec![0u64; STIRLING_ROWS]; STIRLING_ROWS];
        rows[0][0] = 1;
        for k in 1..STIRLING_ROWS {
            for i in 1..=k {
                rows[k][i] = i as u64 * rows[k - 1][i] + rows[k - 1][i - 1];
            }
        }
        rows
    })
}

/// Stirling number of the second kind `S(k, i)`, for `k <= 20`.
pub fn stirling2(k: usize, i: usize) -> u64 {
    assert!(k < STIRLING_ROWS, "Stirling table covers k <= 20");
    if i > k {
        0
    } else {
        stirling_table()[k][i]
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn factorial(k: usize) -> f64 {
    (2..=k).fold(1.0, |acc, j| acc * j as f64)
}

fn check_order(k: usize, limit: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::precondition("moment order k must be at least 1"));
    }
    if k > limit {
        return Err(Error::LimitExceeded {
            name: "k",
            value: k as u64,
            limit: limit as u64,
        });
    }
    Ok(())
}

fn check_time(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::precondition("time n must be at least 1"))
    } else {
        Ok(())
    }
}

/// Alternating sum with precomputed `a_n^{(i)}`, `ratios[i - 1] = a_n^{(i)}`.
fn alternating_sum(k: usize, ratios: &[f64]) -> f64 {
    let mut terms: Vec<f64> = (1..=k)
        .map(|i| {
            let sign = if (k - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(k - 1, i - 1) * ratios[i - 1]
        })
        .collect();
    // largest magnitude last
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    factorial(k) * compensated_sum(terms)
}

fn ratios(n: u64, k_max: usize, p: f64) -> Vec<f64> {
    (1..=k_max).map(|i| gamma_ratio(n, i as f64 * p)).collect()
}

/// `E[(H_n)_k]` for the laziest walk (`q = 0`, `s = 1`).
pub fn factorial_moment(n: u64, k: usize, p: f64) -> Result<f64> {
    check_time(n)?;
    check_order(k, CANCELLATION_LIMIT)?;
    check_probability_open("p", p)?;
    Ok(alternating_sum(k, &ratios(n, k, p)))
}

/// `E[(H_n)^k]` for the laziest walk, via Stirling numbers of the second kind.
pub fn raw_moment(n: u64, k: usize, p: f64) -> Result<f64> {
    raw_moment_with_limit(n, k, p, DEFAULT_K_MAX)
}

pub fn raw_moment_with_limit(n: u64, k: usize, p: f64, k_max: usize) -> Result<f64> {
    check_order(k, k_max.min(CANCELLATION_LIMIT))?;
    Ok(closed_form_table(n, k, p)?.raw_moment(k))
}

/// Closed-form factorial and raw moments for orders `1..=k_max`, sharing the
/// gamma-ratio evaluations.
pub fn closed_form_table(n: u64, k_max: usize, p: f64) -> Result<MomentTable> {
    check_time(n)?;
    check_order(k_max, CANCELLATION_LIMIT)?;
    check_probability_open("p", p)?;
    let ratios = ratios(n, k_max, p);
    let factorial: Vec<f64> = (1..=k_max).map(|k| alternating_sum(k, &ratios)).collect();
    let raw = raw_from_factorial(&factorial);
    Ok(MomentTable { n, factorial, raw })
}

/// `E[X^k] = sum_i S(k, i) E[(X)_i]`, `factorial[i - 1] = E[(X)_i]`.
pub fn raw_from_factorial(factorial: &[f64]) -> Vec<f64> {
    (1..=factorial.len())
        .map(|k| compensated_sum((1..=k).map(|i| stirling2(k, i) as f64 * factorial[i - 1])))
        .collect()
}

/// Factorial and raw moments of a pmf by direct summation over its support.
pub fn moments_from_pmf(pmf: &ExactPmf, k_max: usize) -> MomentTable {
    let mut factorial = vec![CompensatedSum::new(); k_max];
    let mut raw = vec![CompensatedSum::new(); k_max];
    for (h, &mass) in pmf.mass().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let x = h as f64;
        let mut falling = 1.0;
        let mut power = 1.0;
        for k in 0..k_max {
            falling *= x - k as f64;
            power *= x;
            factorial[k].add(mass * falling);
            raw[k].add(mass * power);
        }
    }
    MomentTable {
        n: pmf.n(),
        factorial: factorial.iter().map(CompensatedSum::value).collect(),
        raw: raw.iter().map(CompensatedSum::value).collect(),
    }
}
