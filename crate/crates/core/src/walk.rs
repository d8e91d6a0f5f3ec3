//! Monte Carlo simulation of the minimal walk.
//!
//! Two simulators with the same law: [`simulate_counting`] keeps only the
//! running count `H_k` and draws `X_{k+1} ~ Bernoulli(alpha H_k / k + q)`;
//! [`simulate_full_history`] stores every step and follows the model as
//! stated, copying a uniformly chosen earlier step.

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::gamma_ratio;
use crate::params::WalkParams;
use crate::rng::StreamKey;

pub const FULL_HISTORY_CAP: u64 = 1_000_000;

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulationMode {
    Counting,
    FullHistory,
}

/// Positions of one trajectory at a set of checkpoint times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryStat {
    pub params: WalkParams,
    pub seed: u64,
    pub index: u64,
    pub checkpoints: Vec<u64>,
    pub positions: Vec<u64>,
    /// `H_N / a_N` at the last checkpoint `N`, with `a_N` taken at exponent
    /// `alpha` (which is `p` in the laziest case).
    pub w_hat: f64,
}

impl TrajectoryStat {
    pub fn final_time(&self) -> u64 {
        *self.checkpoints.last().expect("checkpoints are nonempty")
    }

    pub fn final_position(&self) -> u64 {
        *self.positions.last().expect("checkpoints are nonempty")
    }

    /// Position at a recorded checkpoint.
    pub fn position_at(&self, time: u64) -> Option<u64> {
        self.checkpoints
            .binary_search(&time)
            .ok()
            .map(|i| self.positions[i])
    }
}

/// `{1, 2, 4, ..., 2^floor(log2 n), n}`.
pub fn dyadic_checkpoints(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut times: Vec<u64> = (0..64).map(|e| 1u64 << e).take_while(|&t| t <= n).collect();
    if times.last() != Some(&n) {
        times.push(n);
    }
    times
}

fn normalize_checkpoints(n: u64, checkpoints: &[u64]) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::precondition("time n must be at least 1"));
    }
    if checkpoints.is_empty() {
        return Err(Error::precondition("checkpoint list is empty"));
    }
    let mut times = checkpoints.to_vec();
    times.sort_unstable();
    times.dedup();
    if times[0] == 0 {
        return Err(Error::precondition("checkpoints start at time 1"));
    }
    if let Some(&last) = times.last() {
        if last > n {
            return Err(Error::precondition(format!(
                "checkpoint {last} exceeds the horizon n = {n}"
            )));
        }
    }
    Ok(times)
}

fn finish(
    params: &WalkParams,
    key: StreamKey,
    checkpoints: Vec<u64>,
    positions: Vec<u64>,
) -> TrajectoryStat {
    let last = *checkpoints.last().unwrap();
    let w_hat = *positions.last().unwrap() as f64 / gamma_ratio(last, params.alpha());
    TrajectoryStat {
        params: *params,
        seed: key.seed,
        index: key.index,
        checkpoints,
        positions,
        w_hat,
    }
}

/// Count-based simulator: `O(n)` time, `O(1)` state besides the checkpoints.
pub fn simulate_counting(
    params: &WalkParams,
    n: u64,
    key: StreamKey,
    checkpoints: &[u64],
) -> Result<TrajectoryStat> {
    let checkpoints = normalize_checkpoints(n, checkpoints)?;
    let horizon = *checkpoints.last().unwrap();
    let mut rng = key.rng();
    let (alpha, q) = (params.alpha(), params.q());
    let mut positions = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().peekable();

    let mut h: u64 = u64::from(rng.gen::<f64>() < params.s());
    for k in 1..=horizon {
        if next.peek() == Some(&k) {
            positions.push(h);
            next.next();
        }
        if k == horizon {
            break;
        }
        // U < alpha h / k + q with U = bits / 2^53, multiplied through by k
        let bits = (rng.next_u64() >> 11) as f64;
        let kf = k as f64;
        h += u64::from(bits * kf < (alpha * h as f64 + q * kf) * TWO_POW_53);
    }
    Ok(finish(params, key, checkpoints, positions))
}

/// Literal simulator: step `k + 1` looks up the stored step `X_U` for
/// `U` uniform on `{1, ..., k}`.
pub fn simulate_full_history(
    params: &WalkParams,
    n: u64,
    key: StreamKey,
    checkpoints: &[u64],
) -> Result<TrajectoryStat> {
    if n > FULL_HISTORY_CAP {
        return Err(Error::LimitExceeded {
            name: "n",
            value: n,
            limit: FULL_HISTORY_CAP,
        });
    }
    let checkpoints = normalize_checkpoints(n, checkpoints)?;
    let horizon = *checkpoints.last().unwrap();
    let mut rng = key.rng();
    let mut steps: Vec<bool> = Vec::with_capacity(horizon as usize);
    let mut positions = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().peekable();

    steps.push(rng.gen::<f64>() < params.s());
    let mut h = u64::from(steps[0]);
    for k in 1..=horizon {
        if next.peek() == Some(&k) {
            positions.push(h);
            next.next();
        }
        if k == horizon {
            break;
        }
        let recalled = steps[rng.gen_range(0..k as usize)];
        let forward_prob = if recalled { params.p() } else { params.q() };
        let x = rng.gen::<f64>() < forward_prob;
        steps.push(x);
        h += u64::from(x);
    }
    Ok(finish(params, key, checkpoints, positions))
}

pub fn simulate(
    mode: SimulationMode,
    params: &WalkParams,
    n: u64,
    key: StreamKey,
    checkpoints: &[u64],
) -> Result<TrajectoryStat> {
    match mode {
        SimulationMode::Counting => simulate_counting(params, n, key, checkpoints),
        SimulationMode::FullHistory => simulate_full_history(params, n, key, checkpoints),
    }
}

/// Simulates trajectories `0..trials` of experiment `seed` in parallel.
/// The output order (and content) does not depend on the thread count.
pub fn simulate_batch(
    mode: SimulationMode,
    params: &WalkParams,
    n: u64,
    seed: u64,
    trials: u64,
    checkpoints: &[u64],
) -> Result<Vec<TrajectoryStat>> {
    normalize_checkpoints(n, checkpoints)?;
    (0..trials)
        .into_par_iter()
        .map(|i| simulate(mode, params, n, StreamKey::new(seed, i), checkpoints))
        .collect()
}

/// `H_at / a_at` with `a_at = Gamma(at + p) / (Gamma(at) Gamma(1 + p))`.
pub fn estimate_w(stat: &TrajectoryStat, at: u64, p: f64) -> Result<f64> {
    let h = stat
        .position_at(at)
        .ok_or_else(|| Error::precondition(format!("time {at} is not a recorded checkpoint")))?;
    Ok(h as f64 / gamma_ratio(at, p))
}

/// Position `S_n = 2 H_n - n` of the associated biased elephant walk.
pub fn to_biased_position(h: u64, n: u64) -> Result<i64> {
    if h > n {
        return Err(Error::precondition(format!(
            "position h = {h} exceeds time n = {n}"
        )));
    }
    Ok(2 * h as i64 - n as i64)
}
