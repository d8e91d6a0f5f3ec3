mod args;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Format, OUT_DIR_ENV};

/// Exit status classes: 2 for invalid input, 1 for everything else.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Internal(anyhow::Error),
}

impl Failure {
    fn missing(name: &str) -> Self {
        Failure::Validation(format!("missing required parameter --{name}"))
    }
}

impl From<minwalk::Error> for Failure {
    fn from(e: minwalk::Error) -> Self {
        match e {
            minwalk::Error::NotConverged(_) => Failure::Internal(e.into()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Returns whether the command's own checks passed.
fn run(cli: Cli) -> Result<bool, Failure> {
    let config = match &cli.output.config {
        Some(path) => args::load_config(path)?,
        None => Default::default(),
    };
    let mut params = cli.params.or(config.params);
    let format = cli.output.format.or(config.format).unwrap_or_default();
    let command = cli.command;

    if let Some(threads) = cli.output.threads {
        if threads == 0 {
            return Err(Failure::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Internal(e.into()))?;
    }
    if commands::is_monte_carlo(&command) && params.seed.is_none() {
        params.seed = Some(rand::random());
    }

    let out = match cli.output.out.or(config.out) {
        Some(path) => Some(path),
        None => std::env::var_os(OUT_DIR_ENV).map(|dir| {
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            PathBuf::from(dir).join(format!("{}.{ext}", command.name()))
        }),
    };

    let start = Instant::now();
    let artifact = commands::dispatch(&command, &params, format)?;
    let wall_time = start.elapsed().as_secs_f64();

    let summary = json!({
        "command": command.name(),
        "options": commands::options(&command),
        "params": params,
        "seed": params.seed,
        "format": format,
        "output": out,
        "wall_time_seconds": wall_time,
        "passed": artifact.passed,
        "results": artifact.results,
    });
    let summary = serde_json::to_string_pretty(&summary)? + "\n";

    match out {
        Some(path) => {
            std::fs::write(&path, &artifact.data)?;
            let mut summary_path = path.into_os_string();
            summary_path.push(".summary.json");
            std::fs::write(summary_path, summary)?;
        }
        None => {
            std::io::stdout().lock().write_all(&artifact.data)?;
            std::io::stderr().lock().write_all(summary.as_bytes())?;
        }
    }
    Ok(artifact.passed)
}
