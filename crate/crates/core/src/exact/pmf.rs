//! Exact law of `H_n`: forward dynamic program over the Markov state `H_n`,
//! the generating-function recursion as an independent oracle, and an exact
//! rational variant of the dynamic program for small `n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{check_probability_open, WalkParams};
use crate::special::compensated_sum;

pub const DEFAULT_DP_CAP: u64 = 20_000;
pub const DEFAULT_PGF_CAP: u64 = 5_000;
pub const RATIONAL_CAP: u64 = 30;

/// Probability mass function of `H_n` on `{0, ..., n}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactPmf {
    n: u64,
    mass: Vec<f64>,
}

impl ExactPmf {
    /// Wraps a mass vector; `n` is taken to be `mass.len() - 1`.
    pub fn from_mass(mass: Vec<f64>) -> Self {
        assert!(!mass.is_empty(), "a pmf needs at least one support point");
        Self {
            n: mass.len() as u64 - 1,
            mass,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// `P(H_n = h)`, zero outside the support.
    pub fn prob(&self, h: u64) -> f64 {
        self.mass.get(h as usize).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.mass.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.mass.iter().enumerate().map(|(h, m)| h as f64 * m))
    }

    /// Centered second moment, summed around the mean to avoid cancellation.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        compensated_sum(self.mass.iter().enumerate().map(|(h, m)| {
            let d = h as f64 - mean;
            d * d * m
        }))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &ExactPmf) -> f64 {
        let len = self.mass.len().max(other.mass.len());
        (0..len as u64)
            .map(|h| (self.prob(h) - other.prob(h)).abs())
            .fold(0.0, f64::max)
    }

    /// Total-variation distance to another distribution on the integers.
    pub fn tv_distance(&self, other: &[f64]) -> f64 {
        let len = self.mass.len().max(other.len());
        0.5 * compensated_sum(
            (0..len).map(|h| (self.prob(h as u64) - other.get(h).copied().unwrap_or(0.0)).abs()),
        )
    }
}

fn check_cap(n: u64, cap: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::precondition("time n must be at least 1"));
    }
    if n > cap {
        return Err(Error::LimitExceeded {
            name: "n",
            value: n,
            limit: cap,
        });
    }
    Ok(())
}

/// Exact law of `H_n` by dynamic programming, capped at [`DEFAULT_DP_CAP`].
pub fn exact_pmf(n: u64, params: &WalkParams) -> Result<ExactPmf> {
    exact_pmf_with_cap(n, params, DEFAULT_DP_CAP)
}

pub fn exact_pmf_with_cap(n: u64, params: &WalkParams, cap: u64) -> Result<ExactPmf> {
    check_cap(n, cap)?;
    let mut mass = Vec::with_capacity(n as usize + 1);
    mass.push(1.0 - params.s());
    mass.push(params.s());
    for t in 1..n {
        advance(&mut mass, t, params);
    }
    Ok(ExactPmf { n, mass })
}

/// One step of the forward equation, `mass` holding the law of `H_t`.
fn advance(mass: &mut Vec<f64>, t: u64, params: &WalkParams) {
    let up = |h: usize| params.step_up_probability(h as u64, t);
    let top = t as usize + 1;
    mass.push(mass[top - 1] * up(top - 1));
    for h in (1..top).rev() {
        mass[h] = mass[h] * (1.0 - up(h)) + mass[h - 1] * up(h - 1);
    }
    mass[0] *= 1.0 - up(0);
}

/// Iterator over the exact laws of `H_1, H_2, ...`, sharing one DP sweep.
pub fn exact_pmf_path(params: WalkParams) -> impl Iterator<Item = ExactPmf> {
    let mut mass = vec![1.0 - params.s(), params.s()];
    let mut t = 1u64;
    std::iter::from_fn(move || {
        if t > 1 {
            advance(&mut mass, t - 1, &params);
        }
        let out = ExactPmf {
            n: t,
            mass: mass.clone(),
        };
        t += 1;
        Some(out)
    })
}

/// Dense polynomial with `f64` coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(d, c)| d as f64 * c)
                .collect(),
        )
    }

    /// Multiplies by `x (x - 1) = x^2 - x`.
    fn times_x_xm1(&self) -> Poly {
        let mut out = vec![0.0; self.0.len() + 2];
        for (d, c) in self.0.iter().enumerate() {
            out[d + 2] += c;
            out[d + 1] -= c;
        }
        Poly(out)
    }

    fn scale(mut self, factor: f64) -> Poly {
        self.0.iter_mut().for_each(|c| *c *= factor);
        self
    }

    fn add(mut self, other: &Poly) -> Poly {
        if other.0.len() > self.0.len() {
            self.0.resize(other.0.len(), 0.0);
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
        self
    }
}

/// Law of `H_n` in the laziest case from the generating-function recursion
/// `f_{t+1}(x) = p x (x - 1) f_t'(x) / t + f_t(x)`, `f_1(x) = x`.
pub fn pgf_pmf(n: u64, p: f64) -> Result<ExactPmf> {
    pgf_pmf_with_cap(n, p, DEFAULT_PGF_CAP)
}

pub fn pgf_pmf_with_cap(n: u64, p: f64, cap: u64) -> Result<ExactPmf> {
    check_cap(n, cap)?;
    check_probability_open("p", p)?;
    let mut f = Poly(vec![0.0, 1.0]);
    for t in 1..n {
        let increment = f.derivative().times_x_xm1().scale(p / t as f64);
        f = f.add(&increment);
    }
    f.0.resize(n as usize + 1, 0.0);
    Ok(ExactPmf { n, mass: f.0 })
}

/// Exact rational law of `H_n` for `n <= 30`. The `f64` parameters are
/// converted exactly (every finite double is a dyadic rational).
pub fn exact_pmf_rational(n: u64, params: &WalkParams) -> Result<Vec<BigRational>> {
    check_cap(n, RATIONAL_CAP)?;
    let exact = |x: f64| BigRational::from_float(x).expect("parameters are finite");
    let (p, q, s) = (exact(params.p()), exact(params.q()), exact(params.s()));
    let alpha = &p - &q;
    let one = BigRational::one();
    let mut mass = vec![&one - &s, s];
    for t in 1..n {
        let up = |h: usize| &alpha * BigRational::new(BigInt::from(h), BigInt::from(t)) + &q;
        let mut next = vec![BigRational::zero(); mass.len() + 1];
        for (h, m) in mass.iter().enumerate() {
            let u = up(h);
            next[h] += m * (&one - &u);
            next[h + 1] += m * u;
        }
        mass = next;
    }
    Ok(mass)
}
