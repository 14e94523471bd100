//! Front end for `gdecouple`: scenario configs, covariance model strings,
//! the subcommands and their row formats.

pub mod commands;
pub mod config;
pub mod model;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use gdecouple::verify::TestFunctionSpec;

use commands::verify::{PGrid, VerifyOptions};
use commands::Outcome;
use config::{Format, OutputSpec, PPolicy, ScenarioConfig};
use model::ModelSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_HARD_FAIL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gdecouple", version, about = "Decoupling constants for Gaussian vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decoupling coefficient and constants for each section size.
    Analyze(CommonArgs),
    /// Toeplitz determinant asymptotics of a spectral symbol.
    Szego(CommonArgs),
    /// Monte Carlo checks of the decoupling inequalities.
    Verify(VerifyArgs),
    /// Brascamp–Lieb constant of the associated matrix and its upper bound.
    Eb(CommonArgs),
    /// Growth tables for the inverse-power and Hilbert families.
    Examples(ExamplesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON scenario file; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model string, e.g. `ma1:a=0.5`, `inverse_power:r=1`, `hilbert`.
    #[arg(long)]
    pub model: Option<ModelSpec>,
    /// Section sizes, comma separated and strictly ascending.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Fixed exponent instead of `2 p(X)`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Box half-width for the probability checks.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Symbol grid size.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Test functions as a JSON array, e.g. `[{"kind":"cosine","omega":1}]`.
    #[arg(long)]
    pub functions: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Check `2p(X)`, `2p(X)+1` and `4p(X)` instead of the single policy exponent.
    #[arg(long)]
    pub sweep_p: bool,
    /// Use the reciprocal constant; hard failures are expected.
    #[arg(long)]
    pub self_test_negate: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ExamplesArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Configuration problems map to exit code 2, everything else to 1.
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CommonArgs {
    /// Scenario from `--config` or `--model`, with flag overrides applied.
    /// `None` when neither is given.
    pub fn scenario(&self, monte_carlo: bool) -> anyhow::Result<Option<ScenarioConfig>> {
        let mut config = match (&self.config, &self.model) {
            (Some(path), _) => ScenarioConfig::load(path)?,
            (None, Some(m)) => ScenarioConfig::new(m.clone()),
            (None, None) => return Ok(None),
        };
        if let (Some(_), Some(m)) = (&self.config, &self.model) {
            config.model = m.clone();
        }
        self.apply(&mut config)?;
        config.validate(monte_carlo)?;
        Ok(Some(config))
    }

    fn apply(&self, config: &mut ScenarioConfig) -> anyhow::Result<()> {
        if let Some(n) = &self.n {
            config.n_list = n.clone();
        }
        if let Some(p) = self.p {
            config.p_policy = PPolicy::Fixed(p);
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(s) = self.samples {
            config.mc_samples = s;
        }
        if let Some(e) = self.eps {
            config.eps = e;
        }
        if let Some(g) = self.grid {
            config.grid = g;
        }
        if let Some(f) = &self.functions {
            config.functions = serde_json::from_str::<Vec<TestFunctionSpec>>(f).context("parsing --functions")?;
        }
        if self.out.is_some() || self.format.is_some() {
            let prev = config.output.take();
            config.output = Some(OutputSpec {
                path: self.out.clone().or_else(|| prev.as_ref().and_then(|o| o.path.clone())),
                format: self.format.or(prev.map(|o| o.format)).unwrap_or_default(),
            });
        }
        Ok(())
    }

    fn require(&self, monte_carlo: bool) -> Result<ScenarioConfig, CliError> {
        match self.scenario(monte_carlo) {
            Ok(Some(c)) => Ok(c),
            Ok(None) => Err(CliError::Config(anyhow::anyhow!("either --config or --model is required"))),
            Err(e) => Err(CliError::Config(e)),
        }
    }
}

fn emit<T: serde::Serialize>(rows: &[T], format: Format, path: Option<&Path>) -> Result<(), CliError> {
    output::emit(rows, format, path).map_err(CliError::Runtime)
}

fn run_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let opts = VerifyOptions {
        p_grid: if args.sweep_p { PGrid::Sweep } else { PGrid::Policy },
        negate_constant: args.self_test_negate,
    };
    let common = &args.common;
    match common.scenario(true).map_err(CliError::Config)? {
        Some(config) => {
            let (rows, outcome) = commands::verify::run(&config, opts);
            emit(&rows, config.format(), config.output_path())?;
            Ok(outcome)
        }
        None => {
            // Built-in suite: every exponent of the sweep.
            let samples = common.samples.unwrap_or(100_000);
            if samples < config::MIN_MC_SAMPLES {
                return Err(CliError::Config(anyhow::anyhow!(
                    "--samples must be at least {}",
                    config::MIN_MC_SAMPLES
                )));
            }
            let configs = commands::verify::default_suite(samples, common.seed.unwrap_or(0));
            let opts = VerifyOptions {
                p_grid: PGrid::Sweep,
                ..opts
            };
            let (rows, outcome) = commands::verify::run_suite(&configs, opts);
            emit(&rows, common.format.unwrap_or_default(), common.out.as_deref())?;
            Ok(outcome)
        }
    }
}

fn run_examples(args: &ExamplesArgs) -> Result<Outcome, CliError> {
    use commands::examples::*;
    let log_rows = log_growth_table().map_err(CliError::Runtime)?;
    let hilbert_rows = hilbert_table().map_err(CliError::Runtime)?;
    match &args.out {
        Some(path) => {
            let rows: Vec<_> = log_rows.into_iter().chain(hilbert_rows).collect();
            emit(&rows, args.format.unwrap_or_default(), Some(path))?;
        }
        None => match args.format {
            Some(f) => {
                let rows: Vec<_> = log_rows.into_iter().chain(hilbert_rows).collect();
                emit(&rows, f, None)?;
            }
            None => print!("{}", render_text(&log_rows, &hilbert_rows)),
        },
    }
    Ok(Outcome::default())
}

fn jobs(cmd: &Command) -> Option<usize> {
    match cmd {
        Command::Analyze(c) | Command::Szego(c) | Command::Eb(c) => c.jobs,
        Command::Verify(v) => v.common.jobs,
        Command::Examples(_) => None,
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let body = || -> Result<Outcome, CliError> {
        match &cli.command {
            Command::Analyze(c) => {
                let config = c.require(false)?;
                let (rows, outcome) = commands::analyze::run(&config);
                emit(&rows, config.format(), config.output_path())?;
                Ok(outcome)
            }
            Command::Szego(c) => {
                let config = c.require(false)?;
                let (rows, outcome) = commands::szego::run(&config);
                emit(&rows, config.format(), config.output_path())?;
                Ok(outcome)
            }
            Command::Eb(c) => {
                let config = c.require(false)?;
                let (rows, outcome) = commands::eb::run(&config);
                emit(&rows, config.format(), config.output_path())?;
                Ok(outcome)
            }
            Command::Verify(v) => run_verify(v),
            Command::Examples(e) => run_examples(e),
        }
    };
    match jobs(&cli.command) {
        Some(0) => Err(CliError::Config(anyhow::anyhow!("--jobs must be positive"))),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Runtime(e.into()))?
            .install(body),
        None => body(),
    }
}

/// Process exit code: hard failures dominate, then per-row errors.
pub fn exit_code(result: &Result<Outcome, CliError>) -> i32 {
    match result {
        Ok(o) if o.hard_fails > 0 => EXIT_HARD_FAIL,
        Ok(o) if o.errors > 0 => EXIT_RUNTIME,
        Ok(_) => EXIT_OK,
        Err(CliError::Config(_)) => EXIT_CONFIG,
        Err(CliError::Runtime(_)) => EXIT_RUNTIME,
    }
}
