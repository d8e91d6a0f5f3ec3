use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::Failure;

/// Exact computations and Monte Carlo experiments for the minimal
/// step-reinforced random walk.
#[derive(Debug, Parser)]
#[command(name = "minwalk", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub params: ParamArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factorial and raw moments of the laziest walk from the closed form.
    Moments,
    /// Exact law of H_n by dynamic programming.
    Pmf {
        /// Also run the generating-function recursion and print both laws.
        #[arg(long)]
        compare: bool,
    },
    /// Closed-form mean and variance with the variance growth rate.
    MeanVar,
    /// Simulate trajectories and record positions at checkpoints.
    Simulate {
        #[arg(long, value_enum, default_value_t = Mode::Counting)]
        mode: Mode,
    },
    /// Percolation on random recursive trees against the exact walk law.
    Percolate,
    /// Brute-force cluster moments against their closed forms.
    Enumerate,
    /// Mittag-Leffler function values or moments.
    Ml {
        /// Comma-separated arguments; prints moments when absent.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Option<Vec<f64>>,
    },
    /// Central limit experiments.
    Clt {
        #[arg(long, value_enum, default_value_t = CltVariant::RandomCentering)]
        variant: CltVariant,
        #[arg(long, value_enum, default_value_t = Normalization::RandomNorm)]
        normalization: Normalization,
    },
    /// Running extrema of the iterated-logarithm deviation (diagnostic).
    Lil {
        #[arg(long, value_enum, default_value_t = Normalizer::Phi)]
        normalizer: Normalizer,
    },
    /// Run the exact oracle checks and one coupling check.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments => "moments",
            Command::Pmf { .. } => "pmf",
            Command::MeanVar => "mean-var",
            Command::Simulate { .. } => "simulate",
            Command::Percolate => "percolate",
            Command::Enumerate => "enumerate",
            Command::Ml { .. } => "ml",
            Command::Clt { .. } => "clt",
            Command::Lil { .. } => "lil",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Counting,
    FullHistory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CltVariant {
    RandomCentering,
    QPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    RandomNorm,
    HorizonCorrected,
    SelfNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalizer {
    Phi,
    PhiHat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Model and experiment parameters. Every field may also come from the
/// `--config` file; flags take precedence.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamArgs {
    /// Probability of repeating a forward step.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Probability of moving after recalling a rest.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Probability that the first step is forward.
    #[arg(long, global = true)]
    pub s: Option<f64>,
    /// Time (walk length or tree size).
    #[arg(long, global = true)]
    pub n: Option<u64>,
    /// Estimation horizon for the CLT experiment (default 100 n).
    #[arg(long = "horizon", visible_alias = "N", global = true)]
    #[serde(alias = "N")]
    pub horizon: Option<u64>,
    /// Number of independent trials or samples.
    #[arg(long = "trials", visible_alias = "M", global = true)]
    #[serde(alias = "M")]
    pub trials: Option<u64>,
    /// Highest moment order.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Edge retention probability.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Experiment seed; a random one is generated and reported when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated checkpoint times (default dyadic).
    #[arg(long, global = true, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
}

impl ParamArgs {
    /// Fills every unset field from `other`.
    pub fn or(self, other: ParamArgs) -> ParamArgs {
        ParamArgs {
            p: self.p.or(other.p),
            q: self.q.or(other.q),
            s: self.s.or(other.s),
            n: self.n.or(other.n),
            horizon: self.horizon.or(other.horizon),
            trials: self.trials.or(other.trials),
            k: self.k.or(other.k),
            alpha: self.alpha.or(other.alpha),
            seed: self.seed.or(other.seed),
            checkpoints: self.checkpoints.or(other.checkpoints),
        }
    }

    pub fn require_p(&self) -> Result<f64, Failure> {
        self.p.ok_or_else(|| Failure::missing("p"))
    }

    pub fn require_n(&self) -> Result<u64, Failure> {
        self.n.ok_or_else(|| Failure::missing("n"))
    }

    pub fn require_alpha(&self) -> Result<f64, Failure> {
        self.alpha.ok_or_else(|| Failure::missing("alpha"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Data file; the run summary goes to `<out>.summary.json`. Without it
    /// data goes to stdout and the summary to stderr, unless MINWALK_OUT_DIR
    /// names a default directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for Monte Carlo commands.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file with parameter values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

pub const OUT_DIR_ENV: &str = "MINWALK_OUT_DIR";

/// Contents of a `--config` file: parameters plus optional `out` and
/// `format`.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub params: ParamArgs,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

pub fn load_config(path: &Path) -> Result<ConfigFile, Failure> {
    let invalid = |e: &dyn std::fmt::Display| {
        Failure::Validation(format!("invalid config {}: {e}", path.display()))
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let mut map: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(&text).map_err(|e| invalid(&e))?;
    let out = map
        .remove("out")
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| invalid(&e))?;
    let format = map
        .remove("format")
        .map(serde_json::from_value)
        .transpose()
        .map_err(|e| invalid(&e))?;
    let params = serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| invalid(&e))?;
    Ok(ConfigFile {
        params,
        out,
        format,
    })
}
