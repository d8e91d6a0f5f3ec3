//! Oracle-equivalence checks shared by the `selftest` command and the
//! acceptance tests. Each check reports its worst observed discrepancy
//! against a fixed tolerance.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::exact::{
    cluster_moment_formulas, exact_pmf, exact_pmf_path, exact_pmf_rational, factorial_moment,
    gamma_ratio, mean_closed_form, moments_from_pmf, pgf_pmf, raw_moment, variance_closed_form,
    ExactPmf,
};
use crate::rrt::{enumerate_exact, root_cluster_histogram};
use crate::stats::chi_square_gof;
use crate::WalkParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Worst observed discrepancy (or the failing statistic).
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckReport {
    fn below(name: impl Into<String>, worst: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: worst < tolerance,
            worst,
            tolerance,
            detail,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: worst {:.3e} (tolerance {:.1e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.detail
        )
    }
}

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        return 0.0;
    }
    d / a.abs().max(b.abs()).max(1.0)
}

/// Tracks the largest discrepancy and where it happened.
#[derive(Debug, Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }

    fn detail(&self) -> String {
        if self.at.is_empty() {
            String::new()
        } else {
            format!("at {}", self.at)
        }
    }
}

/// Factorial moments from the closed form, the DP pmf and the PGF pmf agree
/// pairwise for the laziest walk.
pub fn oracle_triangle(ps: &[f64], n_max: u64, k_max: usize, tol: f64) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &p in ps {
        let params = WalkParams::laziest(p)?;
        for dp in exact_pmf_path(params).take(n_max as usize) {
            let n = dp.n();
            let pgf = pgf_pmf(n, p)?;
            let from_dp = moments_from_pmf(&dp, k_max);
            let from_pgf = moments_from_pmf(&pgf, k_max);
            for k in 1..=k_max {
                let closed = factorial_moment(n, k, p)?;
                let (d, g) = (from_dp.factorial_moment(k), from_pgf.factorial_moment(k));
                let e = rel_diff(closed, d)
                    .max(rel_diff(closed, g))
                    .max(rel_diff(d, g));
                worst.update(e, || format!("p={p} n={n} k={k}"));
            }
        }
    }
    Ok(CheckReport::below(
        "oracle triangle",
        worst.value,
        tol,
        worst.detail(),
    ))
}

/// Raw moments against the explicit expansions in `a_n^(k)` for `k <= 4`.
pub fn moment_displays(ps: &[f64], n_max: u64, tol: f64) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &p in ps {
        for n in 1..=n_max {
            let a: Vec<f64> = (1..=4).map(|k| gamma_ratio(n, k as f64 * p)).collect();
            let displays = [
                a[0],
                2.0 * a[1] - a[0],
                6.0 * a[2] - 6.0 * a[1] + a[0],
                24.0 * a[3] - 36.0 * a[2] + 14.0 * a[1] - a[0],
            ];
            for (k, display) in displays.iter().enumerate() {
                let e = rel_diff(raw_moment(n, k + 1, p)?, *display);
                worst.update(e, || format!("p={p} n={n} k={}", k + 1));
            }
        }
    }
    Ok(CheckReport::below(
        "moment displays",
        worst.value,
        tol,
        worst.detail(),
    ))
}

/// Brute-force cluster moments against their closed forms.
pub fn enumeration_vs_formulas(alphas: &[f64], n_max: usize, tol: f64) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for &alpha in alphas {
        for n in 1..=n_max {
            let brute = enumerate_exact(n, alpha)?;
            let formula = cluster_moment_formulas(n as u64, alpha)?;
            let pairs = [
                (brute.mean_root, formula.mean_root),
                (brute.second_root, formula.second_root),
                (brute.sum_second, formula.sum_second),
            ];
            for (b, f) in pairs {
                worst.update(rel_diff(b, f), || format!("alpha={alpha} n={n}"));
            }
        }
    }
    Ok(CheckReport::below(
        "enumeration vs cluster formulas",
        worst.value,
        tol,
        worst.detail(),
    ))
}

/// Parameter grid for the mean and variance checks; includes the
/// `alpha = 1/2` branch exactly.
pub fn variance_grid() -> Vec<WalkParams> {
    [
        (0.5, 0.0, 1.0),
        (0.3, 0.0, 1.0),
        (0.9, 0.0, 1.0),
        (0.6, 0.2, 1.0),
        (0.7, 0.1, 0.5),
        (0.75, 0.25, 1.0),
        (0.75, 0.25, 0.3),
        (0.4, 0.3, 0.0),
        (0.95, 0.05, 0.8),
        (0.55, 0.5, 0.5),
        (0.8, 0.6, 0.2),
        (0.2, 0.1, 1.0),
    ]
    .into_iter()
    .map(|(p, q, s)| WalkParams::percolation_regime(p, q, s).expect("grid is valid"))
    .collect()
}

/// Closed-form mean and variance against the DP law along `1..=n_max`.
pub fn moments_vs_dp(grid: &[WalkParams], n_max: u64, tol: f64) -> Result<CheckReport> {
    let mut worst = Worst::default();
    for params in grid {
        for dp in exact_pmf_path(*params).take(n_max as usize) {
            let n = dp.n();
            let e_var = rel_diff(variance_closed_form(n, params)?, dp.variance());
            let e_mean = rel_diff(mean_closed_form(n, params)?, dp.mean());
            worst.update(e_var.max(e_mean), || {
                format!("p={} q={} s={} n={n}", params.p(), params.q(), params.s())
            });
        }
    }
    Ok(CheckReport::below(
        "mean/variance vs DP",
        worst.value,
        tol,
        worst.detail(),
    ))
}

/// Floating-point DP against the exact rational DP.
pub fn dp_vs_rational(grid: &[WalkParams], n: u64, tol: f64) -> Result<CheckReport> {
    use num_traits::ToPrimitive;
    let mut worst = Worst::default();
    for params in grid {
        let dp = exact_pmf(n, params)?;
        let exact = exact_pmf_rational(n, params)?;
        for (h, r) in exact.iter().enumerate() {
            let e = (dp.prob(h as u64) - r.to_f64().unwrap_or(f64::NAN)).abs();
            worst.update(e, || {
                format!("p={} q={} s={} h={h}", params.p(), params.q(), params.s())
            });
        }
    }
    Ok(CheckReport::below(
        "DP vs rational DP",
        worst.value,
        tol,
        worst.detail(),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingResult {
    pub n: usize,
    pub alpha: f64,
    pub samples: u64,
    pub seed: u64,
    pub tv: f64,
    pub chi_square_p: f64,
    pub dof: usize,
}

/// Root-cluster sizes of percolated trees against the exact law of the
/// laziest walk with `p = alpha`.
pub fn coupling(n: usize, alpha: f64, samples: u64, seed: u64) -> Result<CouplingResult> {
    let counts = root_cluster_histogram(n, alpha, seed, samples)?;
    let exact = exact_pmf(n as u64, &WalkParams::laziest(alpha)?)?;
    coupling_from_counts(n, alpha, samples, seed, &counts, &exact)
}

fn coupling_from_counts(
    n: usize,
    alpha: f64,
    samples: u64,
    seed: u64,
    counts: &[u64],
    exact: &ExactPmf,
) -> Result<CouplingResult> {
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    let chi = chi_square_gof(counts, exact, 5.0)?;
    Ok(CouplingResult {
        n,
        alpha,
        samples,
        seed,
        tv: exact.tv_distance(&freq),
        chi_square_p: chi.p_value,
        dof: chi.dof,
    })
}

/// Acceptance rule for the coupling check.
pub const COUPLING_TV_LIMIT: f64 = 0.01;
pub const COUPLING_CHI_LEVEL: f64 = 0.001;

impl CouplingResult {
    pub fn passed(&self) -> bool {
        self.tv < COUPLING_TV_LIMIT && self.chi_square_p > COUPLING_CHI_LEVEL
    }

    pub fn report(&self) -> CheckReport {
        CheckReport {
            name: format!("coupling n={} alpha={}", self.n, self.alpha),
            passed: self.passed(),
            worst: self.tv,
            tolerance: COUPLING_TV_LIMIT,
            detail: format!(
                "chi-square p={:.4} (level {COUPLING_CHI_LEVEL}) dof={} M={} seed={}",
                self.chi_square_p, self.dof, self.samples, self.seed
            ),
        }
    }
}

/// The deterministic oracle checks plus one coupling run.
pub fn selftest_suite() -> Result<Vec<CheckReport>> {
    let grid = variance_grid();
    Ok(vec![
        oracle_triangle(&[0.1, 0.3, 0.5, 0.7, 0.9], 500, 6, 1e-9)?,
        moment_displays(&[0.25, 0.5, 0.75], 200, 1e-10)?,
        enumeration_vs_formulas(&[0.25, 0.5, 0.75], 7, 1e-12)?,
        moments_vs_dp(&grid, 300, 1e-8)?,
        dp_vs_rational(&grid, 30, 1e-14)?,
        coupling(20, 0.5, 200_000, 20_240_101)?.report(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_diff_has_unit_floor() {
        assert_eq!(rel_diff(1e-13, 0.0), 1e-13);
        assert!((rel_diff(200.0, 202.0) - 2.0 / 202.0).abs() < 1e-15);
        assert_eq!(rel_diff(3.0, 3.0), 0.0);
    }

    #[test]
    fn small_checks_pass() {
        assert!(oracle_triangle(&[0.4], 40, 4, 1e-9).unwrap().passed);
        assert!(moment_displays(&[0.4], 40, 1e-10).unwrap().passed);
        assert!(enumeration_vs_formulas(&[0.3], 4, 1e-12).unwrap().passed);
        assert!(moments_vs_dp(&variance_grid(), 30, 1e-8).unwrap().passed);
    }

    #[test]
    fn failing_check_is_reported() {
        let r = CheckReport::below("x", 0.2, 0.1, String::new());
        assert!(!r.passed);
        assert!(r.to_string().starts_with("FAIL x"));
    }
}
