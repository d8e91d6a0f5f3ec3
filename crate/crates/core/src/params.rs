//! Model parameters of the minimal step-reinforced walk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(p, q, s)` of the minimal walk.
///
/// After the first step (forward with probability `s`), step `n + 1` looks at
/// a uniformly chosen earlier step: a past forward step is repeated with
/// probability `p`, a past rest is turned into a forward step with
/// probability `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    p: f64,
    q: f64,
    s: f64,
}

impl WalkParams {
    /// Validates `0 < p < 1`, `0 <= q < 1`, `0 <= s <= 1`.
    pub fn new(p: f64, q: f64, s: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                expected: "0 < p < 1",
            });
        }
        if !(0.0..1.0).contains(&q) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: q,
                expected: "0 <= q < 1",
            });
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter {
                name: "s",
                value: s,
                expected: "0 <= s <= 1",
            });
        }
        Ok(Self { p, q, s })
    }

    /// The laziest case `q = 0, s = 1`.
    pub fn laziest(p: f64) -> Result<Self> {
        Self::new(p, 0.0, 1.0)
    }

    /// Like [`WalkParams::new`] but additionally requires `q < p`, the regime
    /// in which the walk is a divide-and-color functional of percolation.
    pub fn percolation_regime(p: f64, q: f64, s: f64) -> Result<Self> {
        let params = Self::new(p, q, s)?;
        params.require_percolation_regime()?;
        Ok(params)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Reinforcement strength `alpha = p - q`, in `(-1, 1)`.
    pub fn alpha(&self) -> f64 {
        self.p - self.q
    }

    /// Long-run forward fraction `rho = q / (1 - alpha)`, in `[0, 1)`.
    pub fn rho(&self) -> f64 {
        self.q / (1.0 - self.alpha())
    }

    pub fn is_laziest(&self) -> bool {
        self.q == 0.0 && self.s == 1.0
    }

    /// Probability that step `n + 1` is a forward step given `h` forward
    /// steps among the first `n`.
    #[inline]
    pub fn step_up_probability(&self, h: u64, n: u64) -> f64 {
        debug_assert!(n >= 1 && h <= n);
        self.alpha() * (h as f64 / n as f64) + self.q
    }

    pub(crate) fn require_percolation_regime(&self) -> Result<()> {
        if self.q < self.p {
            Ok(())
        } else {
            Err(Error::precondition(format!(
                "requires 0 <= q < p < 1, got p = {}, q = {}",
                self.p, self.q
            )))
        }
    }

    pub(crate) fn require_laziest(&self) -> Result<()> {
        if self.is_laziest() {
            Ok(())
        } else {
            Err(Error::precondition(format!(
                "requires q = 0 and s = 1, got q = {}, s = {}",
                self.q, self.s
            )))
        }
    }
}

pub(crate) fn check_probability_open(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "a value in (0, 1)",
        })
    }
}

pub(crate) fn check_probability_closed(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "a value in [0, 1]",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quantities() {
        let params = WalkParams::new(0.5, 0.25, 1.0).unwrap();
        assert_eq!(params.alpha(), 0.25);
        assert!((params.rho() - 1.0 / 3.0).abs() < 1e-15);
        assert!(!params.is_laziest());
        assert!(WalkParams::laziest(0.3).unwrap().is_laziest());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(WalkParams::new(0.0, 0.0, 1.0).is_err());
        assert!(WalkParams::new(1.0, 0.0, 1.0).is_err());
        assert!(WalkParams::new(0.5, 1.0, 1.0).is_err());
        assert!(WalkParams::new(0.5, -0.1, 1.0).is_err());
        assert!(WalkParams::new(0.5, 0.0, 1.5).is_err());
        assert!(WalkParams::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(WalkParams::percolation_regime(0.3, 0.3, 1.0).is_err());
        assert!(WalkParams::percolation_regime(0.3, 0.6, 1.0).is_err());
        assert!(WalkParams::percolation_regime(0.6, 0.3, 1.0).is_ok());
    }

    #[test]
    fn negative_alpha_is_a_valid_model() {
        let params = WalkParams::new(0.2, 0.7, 0.5).unwrap();
        assert!((params.alpha() + 0.5).abs() < 1e-15);
        assert!(params.rho() < 1.0 && params.rho() >= 0.0);
    }
}
