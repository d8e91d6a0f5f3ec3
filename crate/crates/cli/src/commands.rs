use serde::Serialize;
use serde_json::{json, Value};

use minwalk::checks::{self, rel_diff};
use minwalk::exact::{
    closed_form_table, cluster_moment_formulas, exact_pmf, mean_closed_form, pgf_pmf,
    variance_asymptotic, variance_closed_form, ExactPmf, DEFAULT_K_MAX,
};
use minwalk::io::{self, fmt_g17};
use minwalk::mittag_leffler::{ml_function, ml_moment, MLParams};
use minwalk::rng::StreamKey;
use minwalk::rrt::{divide_and_color_histogram, enumerate_exact, root_cluster_histogram};
use minwalk::stats::{
    chi_square_gof, clt_experiment, lil_tracker, q_positive_clt_experiment, CltNormalization,
    CltOutcome, LilNormalizer, StreamMoments,
};
use minwalk::walk::{dyadic_checkpoints, simulate_batch, simulate_counting, SimulationMode};
use minwalk::WalkParams;

use crate::args::{CltVariant, Command, Format, Mode, Normalization, Normalizer, ParamArgs};
use crate::Failure;

const DEFAULT_PERCOLATION_SAMPLES: u64 = 100_000;
const DEFAULT_CLT_TRIALS: u64 = 1_000;
const DEFAULT_ML_MOMENTS: usize = 4;

/// Data for the output file plus results for the run summary.
pub struct Artifact {
    pub data: Vec<u8>,
    pub results: Value,
    pub passed: bool,
}

impl Artifact {
    fn new(data: Vec<u8>, results: Value) -> Self {
        Self {
            data,
            results,
            passed: true,
        }
    }
}

pub fn is_monte_carlo(command: &Command) -> bool {
    matches!(
        command,
        Command::Simulate { .. } | Command::Percolate | Command::Clt { .. } | Command::Lil { .. }
    )
}

pub fn options(command: &Command) -> Value {
    match command {
        Command::Pmf { compare } => json!({ "compare": compare }),
        Command::Simulate { mode } => json!({ "mode": mode }),
        Command::Ml { lambda } => json!({ "lambda": lambda }),
        Command::Clt {
            variant,
            normalization,
        } => json!({ "variant": variant, "normalization": normalization }),
        Command::Lil { normalizer } => json!({ "normalizer": normalizer }),
        _ => json!({}),
    }
}

pub fn dispatch(
    command: &Command,
    params: &ParamArgs,
    format: Format,
) -> Result<Artifact, Failure> {
    match command {
        Command::Moments => moments(params, format),
        Command::Pmf { compare } => pmf(params, format, *compare),
        Command::MeanVar => mean_var(params, format),
        Command::Simulate { mode } => simulate(params, format, *mode),
        Command::Percolate => percolate(params, format),
        Command::Enumerate => enumerate(params, format),
        Command::Ml { lambda } => ml(params, format, lambda.as_deref()),
        Command::Clt {
            variant,
            normalization,
        } => clt(params, format, *variant, *normalization),
        Command::Lil { normalizer } => lil(params, format, *normalizer),
        Command::Selftest => selftest(format),
    }
}

fn walk_params(params: &ParamArgs) -> Result<WalkParams, Failure> {
    Ok(WalkParams::new(
        params.require_p()?,
        params.q.unwrap_or(0.0),
        params.s.unwrap_or(1.0),
    )?)
}

fn laziest_params(params: &ParamArgs, command: &str) -> Result<WalkParams, Failure> {
    let walk = walk_params(params)?;
    if !walk.is_laziest() {
        return Err(Failure::Validation(format!(
            "`{command}` requires the laziest walk (q = 0, s = 1)"
        )));
    }
    Ok(walk)
}

fn seed(params: &ParamArgs) -> u64 {
    params.seed.expect("seed is filled in before dispatch")
}

fn trials(params: &ParamArgs, default: u64) -> Result<u64, Failure> {
    match params.trials.unwrap_or(default) {
        0 => Err(Failure::Validation("--trials must be at least 1".into())),
        m => Ok(m),
    }
}

fn encode<T: Serialize>(
    format: Format,
    value: &T,
    csv: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => csv(&mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, value)?;
            buf.push(b'\n');
        }
    }
    Ok(buf)
}

fn moments(params: &ParamArgs, format: Format) -> Result<Artifact, Failure> {
    let walk = laziest_params(params, "moments")?;
    let n = params.require_n()?;
    let table = closed_form_table(n, params.k.unwrap_or(DEFAULT_K_MAX), walk.p())?;
    let data = encode(format, &table, |w| io::write_moment_table_csv(w, &table))?;
    Ok(Artifact::new(data, json!({ "k_max": table.k_max() })))
}

fn pmf(params: &ParamArgs, format: Format, compare: bool) -> Result<Artifact, Failure> {
    let walk = walk_params(params)?;
    let n = params.require_n()?;
    if compare {
        if !walk.is_laziest() {
            return Err(Failure::Validation(
                "`pmf --compare` requires the laziest walk (q = 0, s = 1)".into(),
            ));
        }
        let dp = exact_pmf(n, &walk)?;
        let pgf = pgf_pmf(n, walk.p())?;
        let diff = dp.max_abs_diff(&pgf);
        let data = encode(format, &json!({ "dp": dp, "pgf": pgf }), |w| {
            io::write_pmf_comparison_csv(w, &dp, &pgf)
        })?;
        return Ok(Artifact::new(data, json!({ "max_abs_diff": diff })));
    }
    let law = exact_pmf(n, &walk)?;
    let data = encode(format, &law, |w| io::write_pmf_csv(w, &law))?;
    Ok(Artifact::new(
        data,
        json!({ "mean": law.mean(), "variance": law.variance(), "total": law.total() }),
    ))
}

fn mean_var(params: &ParamArgs, format: Format) -> Result<Artifact, Failure> {
    let walk = WalkParams::percolation_regime(
        params.require_p()?,
        params.q.unwrap_or(0.0),
        params.s.unwrap_or(1.0),
    )?;
    let n = params.require_n()?;
    let mean = mean_closed_form(n, &walk)?;
    let variance = variance_closed_form(n, &walk)?;
    let asymptote = if walk.q() > 0.0 {
        Some(variance_asymptotic(&walk)?)
    } else {
        None
    };
    let leading = asymptote.map(|a| a.leading_term(n));
    let value = json!({
        "n": n,
        "mean": mean,
        "variance": variance,
        "asymptote": asymptote,
        "leading_term": leading,
    });
    let data = encode(format, &value, |w| {
        use std::io::Write;
        writeln!(w, "n,mean,variance,growth,coefficient,leading_term")?;
        let (growth, coefficient) = match asymptote {
            Some(a) => (
                serde_json::to_value(a.growth)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_owned))
                    .unwrap_or_default(),
                fmt_g17(a.coefficient),
            ),
            None => (String::new(), String::new()),
        };
        writeln!(
            w,
            "{n},{},{},{growth},{coefficient},{}",
            fmt_g17(mean),
            fmt_g17(variance),
            leading.map(fmt_g17).unwrap_or_default()
        )
    })?;
    Ok(Artifact::new(data, value))
}

fn simulate(params: &ParamArgs, format: Format, mode: Mode) -> Result<Artifact, Failure> {
    let walk = walk_params(params)?;
    let n = params.require_n()?;
    let trials = trials(params, 1)?;
    let checkpoints = params
        .checkpoints
        .clone()
        .unwrap_or_else(|| dyadic_checkpoints(n));
    let mode = match mode {
        Mode::Counting => SimulationMode::Counting,
        Mode::FullHistory => SimulationMode::FullHistory,
    };
    let stats = simulate_batch(mode, &walk, n, seed(params), trials, &checkpoints)?;
    let finals: StreamMoments = stats.iter().map(|s| s.final_position() as f64).collect();
    let data = encode(format, &stats, |w| io::write_trajectories_csv(w, &stats))?;
    Ok(Artifact::new(
        data,
        json!({
            "trials": trials,
            "mean_final_position": finals.mean(),
            "exact_mean": if walk.alpha() > 0.0 { mean_closed_form(n, &walk).ok() } else { None },
        }),
    ))
}

fn histogram_results(counts: &[u64], exact: &ExactPmf) -> Value {
    let total: u64 = counts.iter().sum();
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let chi = chi_square_gof(counts, exact, 5.0).ok();
    json!({
        "samples": total,
        "tv_distance": exact.tv_distance(&freq),
        "chi_square": chi,
    })
}

fn percolate(params: &ParamArgs, format: Format) -> Result<Artifact, Failure> {
    let n = params.require_n()?;
    let n_vertices =
        usize::try_from(n).map_err(|_| Failure::Validation("n is too large".into()))?;
    let samples = trials(params, DEFAULT_PERCOLATION_SAMPLES)?;
    let (counts, exact, kind) =
        match (params.alpha, params.p) {
            (Some(_), Some(_)) => return Err(Failure::Validation(
                "give either --alpha (root cluster) or --p/--q/--s (divide and color), not both"
                    .into(),
            )),
            (Some(alpha), None) => {
                let walk = WalkParams::laziest(alpha)?;
                let exact = exact_pmf(n, &walk)?;
                (
                    root_cluster_histogram(n_vertices, alpha, seed(params), samples)?,
                    exact,
                    "root_cluster",
                )
            }
            (None, Some(_)) => {
                let walk = WalkParams::percolation_regime(
                    params.require_p()?,
                    params.q.unwrap_or(0.0),
                    params.s.unwrap_or(1.0),
                )?;
                let exact = exact_pmf(n, &walk)?;
                (
                    divide_and_color_histogram(n_vertices, &walk, seed(params), samples)?,
                    exact,
                    "divide_and_color",
                )
            }
            (None, None) => return Err(Failure::missing("alpha")),
        };
    let mut results = histogram_results(&counts, &exact);
    results["kind"] = json!(kind);
    let data = encode(
        format,
        &json!({ "counts": counts, "exact": exact.mass() }),
        |w| io::write_histogram_csv(w, &counts, &exact),
    )?;
    Ok(Artifact::new(data, results))
}

fn enumerate(params: &ParamArgs, format: Format) -> Result<Artifact, Failure> {
    let n = params.require_n()?;
    let alpha = params.require_alpha()?;
    let n_vertices =
        usize::try_from(n).map_err(|_| Failure::Validation("n is too large".into()))?;
    let brute = enumerate_exact(n_vertices, alpha)?;
    let formula = cluster_moment_formulas(n, alpha)?;
    let rows = [
        ("mean_root", brute.mean_root, formula.mean_root),
        ("second_root", brute.second_root, formula.second_root),
        ("sum_second", brute.sum_second, formula.sum_second),
    ];
    let worst = rows
        .iter()
        .map(|&(_, b, f)| rel_diff(b, f))
        .fold(0.0, f64::max);
    let value = json!({ "enumerated": brute, "formula": formula });
    let data = encode(format, &value, |w| {
        use std::io::Write;
        writeln!(w, "quantity,enumerated,formula,abs_diff")?;
        for (name, b, f) in rows {
            writeln!(
                w,
                "{name},{},{},{}",
                fmt_g17(b),
                fmt_g17(f),
                fmt_g17((b - f).abs())
            )?;
        }
        Ok(())
    })?;
    Ok(Artifact::new(data, json!({ "max_rel_diff": worst })))
}

fn ml(params: &ParamArgs, format: Format, lambda: Option<&[f64]>) -> Result<Artifact, Failure> {
    let p = params.require_p()?;
    let ml = MLParams::new(p)?;
    let (header, rows): (&str, Vec<(String, f64)>) = match lambda {
        Some(lambdas) => (
            "lambda,value",
            lambdas
                .iter()
                .map(|&l| Ok((fmt_g17(l), ml_function(&ml, l)?)))
                .collect::<Result<_, Failure>>()?,
        ),
        None => (
            "index,value",
            (1..=params.k.unwrap_or(DEFAULT_ML_MOMENTS))
                .map(|k| {
                    let k = u32::try_from(k)
                        .map_err(|_| Failure::Validation("k is too large".into()))?;
                    Ok((k.to_string(), ml_moment(p, k)?))
                })
                .collect::<Result<_, Failure>>()?,
        ),
    };
    let value: Vec<Value> = rows
        .iter()
        .map(|(x, v)| json!({ "x": x, "value": v }))
        .collect();
    let data = encode(format, &value, |w| {
        use std::io::Write;
        writeln!(w, "{header}")?;
        for (x, v) in &rows {
            writeln!(w, "{x},{}", fmt_g17(*v))?;
        }
        Ok(())
    })?;
    Ok(Artifact::new(data, json!({ "p": p })))
}

fn clt_results(
    outcome: &CltOutcome,
    n: u64,
    horizon: Option<u64>,
    trials: u64,
    seed: u64,
) -> Value {
    json!({
        "ks_statistic": outcome.ks.statistic,
        "p_value": outcome.ks.p_value,
        "n": n,
        "N": horizon,
        "M": trials,
        "seed": seed,
        "sample_mean": outcome.moments.mean(),
        "sample_variance": outcome.moments.variance(),
    })
}

fn clt(
    params: &ParamArgs,
    format: Format,
    variant: CltVariant,
    normalization: Normalization,
) -> Result<Artifact, Failure> {
    let n = params.require_n()?;
    let trials = trials(params, DEFAULT_CLT_TRIALS)?;
    let seed = seed(params);
    let (outcome, results) = match variant {
        CltVariant::RandomCentering => {
            let walk = laziest_params(params, "clt")?;
            let horizon = params
                .horizon
                .unwrap_or_else(|| n.saturating_mul(minwalk::stats::MIN_HORIZON_RATIO));
            let normalization = match normalization {
                Normalization::RandomNorm => CltNormalization::RandomNorm,
                Normalization::HorizonCorrected => CltNormalization::HorizonCorrected,
                Normalization::SelfNormalized => CltNormalization::SelfNormalized,
            };
            let out = clt_experiment(&walk, n, horizon, trials, seed, normalization)?;
            let results = clt_results(&out, n, Some(horizon), trials, seed);
            (out, results)
        }
        CltVariant::QPositive => {
            let walk = walk_params(params)?;
            let out = q_positive_clt_experiment(&walk, n, trials, seed)?;
            let mut results = clt_results(&out.clt, n, None, trials, seed);
            results["variance_rate"] = json!(out.variance_rate);
            results["exact_mean"] = json!(out.exact_mean);
            (out.clt, results)
        }
    };
    let data = encode(format, &outcome.samples, |w| {
        io::write_values_csv(w, &outcome.samples)
    })?;
    Ok(Artifact::new(data, results))
}

fn lil(params: &ParamArgs, format: Format, normalizer: Normalizer) -> Result<Artifact, Failure> {
    let walk = walk_params(params)?;
    let n = params.require_n()?;
    let trials = trials(params, 1)?;
    let seed = seed(params);
    let checkpoints = params
        .checkpoints
        .clone()
        .unwrap_or_else(|| dyadic_checkpoints(n));
    let normalizer = match normalizer {
        Normalizer::Phi => LilNormalizer::Phi,
        Normalizer::PhiHat => LilNormalizer::PhiHat,
    };
    let states = (0..trials)
        .map(|i| {
            let stat = simulate_counting(&walk, n, StreamKey::new(seed, i), &checkpoints)?;
            Ok(lil_tracker(&stat, normalizer)?)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let extrema: Vec<Value> = states
        .iter()
        .map(
            |s| json!({ "running_max": s.running_max.last(), "running_min": s.running_min.last() }),
        )
        .collect();
    let data = encode(format, &states, |w| {
        use std::io::Write;
        writeln!(w, "{}", io::LIL_CSV_HEADER)?;
        for (i, state) in states.iter().enumerate() {
            io::write_lil_csv(w, seed, i as u64, state)?;
        }
        Ok(())
    })?;
    Ok(Artifact::new(
        data,
        json!({ "diagnostic": true, "final_extrema": extrema }),
    ))
}

fn selftest(format: Format) -> Result<Artifact, Failure> {
    let reports = checks::selftest_suite()?;
    let passed = reports.iter().all(|r| r.passed);
    for r in &reports {
        eprintln!("{r}");
    }
    let data = encode(format, &reports, |w| {
        use std::io::Write;
        writeln!(w, "name,passed,worst,tolerance,detail")?;
        for r in &reports {
            writeln!(
                w,
                "\"{}\",{},{},{},\"{}\"",
                r.name,
                r.passed,
                fmt_g17(r.worst),
                fmt_g17(r.tolerance),
                r.detail
            )?;
        }
        Ok(())
    })?;
    Ok(Artifact {
        data,
        results: json!({ "checks": reports.len(), "failed": reports.iter().filter(|r| !r.passed).count() }),
        passed,
    })
}
