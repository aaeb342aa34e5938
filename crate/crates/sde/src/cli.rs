//! Argument definitions for the `sde` binary and their translation into
//! the library's request types.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sde::{
    parse_config_file, BenchSettings, CountRequest, EvalRequest, FitSettings, InputSource,
    Overrides, RunConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "sde",
    version,
    about = "Symbolic density estimation: recover closed-form log-PMFs from count data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit a closed-form log-PMF to counts and write a JSON report
    Fit(FitArgs),
    /// Sample a distribution spec into a counts CSV
    Sample(SampleArgs),
    /// Tabulate an expression over an integer window
    Eval(EvalArgs),
    /// Run the symbolic-recovery benchmark suite
    Bench(BenchArgs),
    /// Count the grammar-constrained expression space exactly
    CountSpace(CountSpaceArgs),
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Counts CSV with `x,count` rows (alternative to --family)
    #[arg(long, value_name = "csv")]
    pub input: Option<PathBuf>,
    /// Distribution spec string, e.g. "poisson:lam=12" (needs --samples)
    #[arg(long, value_name = "spec", conflicts_with = "input", requires = "samples")]
    pub family: Option<String>,
    /// Number of samples to draw for --family
    #[arg(long, value_name = "M", conflicts_with = "input", requires = "family")]
    pub samples: Option<u64>,
    /// Laplace smoothing pseudo-count [default: 0.5]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Expected-count threshold for support truncation [default: 4]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Weight exponent [default: 1]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Independent populations [default: 30]
    #[arg(long)]
    pub populations: Option<usize>,
    /// Individuals per population [default: 60]
    #[arg(long)]
    pub pop_size: Option<usize>,
    /// Generations per population [default: 3000]
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Expression node-count cap [default: 15]
    #[arg(long)]
    pub max_size: Option<usize>,
    /// Simplex restarts per constant refit [default: 8]
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Comma list of cost profiles [default: 1,2]
    #[arg(long, value_name = "list", value_delimiter = ',')]
    pub profiles: Option<Vec<String>>,
    /// Enable the logaddexp mixture primitive
    #[arg(long)]
    pub enable_mixture: bool,
    /// Enable the logdelta0 zero-inflation primitive
    #[arg(long)]
    pub enable_zeroinfl: bool,
    /// Master seed [default: 0]; the SDE_SEED environment variable wins
    #[arg(long)]
    pub seed: Option<u64>,
    /// key=value config file using these flag spellings; flags win
    #[arg(long, value_name = "path")]
    pub config: Option<PathBuf>,
    /// JSON report destination
    #[arg(long, value_name = "json")]
    pub out: PathBuf,
    /// Plot-data CSV destination (columns x,y_target,f_model,weight)
    #[arg(long, value_name = "csv")]
    pub plot_data: Option<PathBuf>,
    /// Per-generation search progress log destination
    #[arg(long, value_name = "log")]
    pub progress: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Distribution spec string, e.g. "zi:pi=0.35;poisson:lam=3"
    #[arg(long, value_name = "spec")]
    pub family: String,
    /// Number of samples to draw
    #[arg(long, value_name = "M")]
    pub samples: u64,
    /// Sampling seed; the SDE_SEED environment variable wins
    #[arg(long)]
    pub seed: u64,
    /// Counts CSV destination
    #[arg(long, value_name = "csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Expression text, e.g. "(x0 * 2.485) - (logF(x0) + 12)"
    #[arg(long, value_name = "text")]
    pub expr: String,
    #[arg(long, value_name = "int")]
    pub x_min: i64,
    #[arg(long, value_name = "int")]
    pub x_max: i64,
    /// Run the window-level validity checks (normalization, log-mass,
    /// operator caps) and fail if any is violated
    #[arg(long)]
    pub check_validity: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// `fast`, `full`, or a comma list of catalog names
    #[arg(long, value_name = "selection")]
    pub suite: String,
    /// Samples per training and evaluation draw
    #[arg(long, value_name = "M")]
    pub samples: u64,
    /// Suite master seed; the SDE_SEED environment variable wins
    #[arg(long)]
    pub seed: u64,
    /// Concurrent benchmark rows
    #[arg(long, value_name = "n")]
    pub jobs: usize,
    /// JSON report destination (rewritten after every completed row)
    #[arg(long, value_name = "json")]
    pub out: PathBuf,
    /// key=value config file for the fit knobs; flags win
    #[arg(long, value_name = "path")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CountSpaceArgs {
    /// Cost budget
    #[arg(long, value_name = "B")]
    pub budget: u32,
    /// Operator cost table
    #[arg(long, value_name = "uniform|profile1|profile2")]
    pub costs: String,
    /// Structural constraint level
    #[arg(long, value_name = "none|atomic|full")]
    pub constraints: String,
    /// Cross-check the DP against brute-force enumeration
    #[arg(long)]
    pub brute_check: bool,
    /// Count trees of cost <= budget (le) or == budget (eq) [default: le]
    #[arg(long, value_name = "le|eq", default_value = "le")]
    pub count_mode: String,
    /// Commutative operand orderings counted apart or merged [default: distinct]
    #[arg(long, value_name = "distinct|merged", default_value = "distinct")]
    pub commutative: String,
}

/// `SDE_SEED` from the process environment, if set.
pub fn env_seed() -> Option<String> {
    std::env::var("SDE_SEED").ok()
}

fn load_config_file(path: Option<&PathBuf>) -> Result<Option<Overrides>> {
    match path {
        None => Ok(None),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let overrides =
                parse_config_file(&text).with_context(|| format!("parsing {}", p.display()))?;
            Ok(Some(overrides))
        }
    }
}

impl FitArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            alpha: self.alpha,
            tau: self.tau,
            gamma: self.gamma,
            populations: self.populations,
            pop_size: self.pop_size,
            iterations: self.iterations,
            max_size: self.max_size,
            restarts: self.restarts,
            profiles: self.profiles.clone(),
            // Presence-only flags: absent means "defer to file/default".
            enable_mixture: self.enable_mixture.then_some(true),
            enable_zeroinfl: self.enable_zeroinfl.then_some(true),
            seed: self.seed,
        }
    }

    pub fn run_config(&self, env_seed: Option<&str>) -> Result<RunConfig> {
        let file = load_config_file(self.config.as_ref())?;
        let settings = FitSettings::resolve(file.as_ref(), &self.overrides(), env_seed)?;
        let input = match (&self.input, &self.family, self.samples) {
            (Some(path), None, None) => InputSource::CountsCsv(path.clone()),
            (None, Some(spec), Some(samples)) => InputSource::Synthetic {
                spec: targets::parse_spec(spec).context("parsing --family")?,
                samples,
            },
            _ => bail!(
                "exactly one input source required: --input <csv>, or --family <spec> with --samples <M>"
            ),
        };
        Ok(RunConfig {
            input,
            settings,
            out: Some(self.out.clone()),
            plot_data: self.plot_data.clone(),
            progress: self.progress.clone(),
        })
    }
}

impl BenchArgs {
    pub fn settings(&self, env_seed: Option<&str>) -> Result<BenchSettings> {
        let file = load_config_file(self.config.as_ref())?;
        let flags = Overrides { seed: Some(self.seed), ..Overrides::default() };
        let fit = FitSettings::resolve(file.as_ref(), &flags, env_seed)?;
        Ok(BenchSettings {
            suite: sde::resolve_suite(&self.suite)?,
            samples: self.samples,
            jobs: self.jobs,
            fit,
        })
    }
}

impl EvalArgs {
    pub fn request(&self) -> EvalRequest {
        EvalRequest {
            expr_text: self.expr.clone(),
            x_min: self.x_min,
            x_max: self.x_max,
            check_validity: self.check_validity,
        }
    }
}

impl CountSpaceArgs {
    pub fn request(&self) -> CountRequest {
        CountRequest {
            budget: self.budget,
            costs: self.costs.clone(),
            constraints: self.constraints.clone(),
            brute_check: self.brute_check,
            count_mode: self.count_mode.clone(),
            commutative: self.commutative.clone(),
        }
    }
}
