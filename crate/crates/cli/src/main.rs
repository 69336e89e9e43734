//! `nsfd`: run mass-action models through the reversible integrator and its
//! analyses.
//!
//! Exit codes: 0 success, 1 bad input or model, 2 numerical failure, 3 a
//! `--strict` check found a violation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nsfd_core::{NsfdError, Scheme};

#[derive(Parser, Debug)]
#[command(
    name = "nsfd",
    version,
    about = "Reversible NSFD integration of mass-action models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model file (JSON).
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "builtin",
        required_unless_present = "builtin"
    )]
    pub model: Option<PathBuf>,
    /// Built-in model: logistic, si or host-vector.
    #[arg(long, value_name = "NAME")]
    pub builtin: Option<String>,
    /// Built-in parameter override, e.g. `--param beta=2`.
    #[arg(long = "param", value_name = "KEY=VALUE", value_parser = parse_param, requires = "builtin")]
    pub params: Vec<(String, f64)>,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate a trajectory and write it as CSV.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Initial state, comma separated.
        #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
        x0: State,
        #[arg(long)]
        h: f64,
        #[arg(long, conflicts_with = "t_final", required_unless_present = "t_final")]
        steps: Option<usize>,
        /// Final time; must be an integer multiple of h.
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value = "nsfd", value_parser = parse_scheme)]
        scheme: Scheme,
        /// Significant digits in the CSV; 0 prints the shortest round-trip form.
        #[arg(long, default_value_t = 17)]
        precision: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print the safe step bound and its per-column data.
    StepBound {
        #[command(flatten)]
        model: ModelArgs,
        /// Cap used when the bound is infinite.
        #[arg(long, default_value_t = nsfd_core::integrator::DEFAULT_H_MAX)]
        h_max: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Estimate the observed order of accuracy from runs at h and h/2.
    Order {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
        x0: State,
        #[arg(long)]
        t_final: f64,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value = "nsfd", value_parser = parse_scheme)]
        scheme: Scheme,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Find equilibria from seeds and compare continuous and discrete eigenvalues.
    Stability {
        #[command(flatten)]
        model: ModelArgs,
        /// Newton seed, comma separated; repeat for several seeds.
        #[arg(long = "seed-point", value_parser = parse_state, allow_hyphen_values = true, required = true)]
        seeds: Vec<State>,
        #[arg(long)]
        h: f64,
        /// Exit 3 when any classification disagrees.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tangent-condition checks and a randomized invariance audit.
    Invariance {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, env = "NSFD_SEED", default_value_t = 0)]
        seed: u64,
        /// Boundary samples for each tangent check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value = "nsfd", value_parser = parse_scheme)]
        scheme: Scheme,
        /// Exit 3 when any violation or exit is found.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Measure how well a backward step undoes a forward step.
    Reversibility {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, env = "NSFD_SEED", default_value_t = 0)]
        seed: u64,
        /// Check this state only instead of random interior points.
        #[arg(long, value_parser = parse_state, allow_hyphen_values = true)]
        x0: Option<State>,
        /// Exit 3 when the relative residual exceeds 1e-11.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Write a model as JSON.
    ExportModel {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the structural assumptions behind positivity and the step bound.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        /// Exit 3 when any flag fails.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected KEY=VALUE, got '{s}'"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|e| format!("bad value for '{k}': {e}"))?;
    Ok((k.trim().to_string(), v))
}

/// Comma-separated state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct State(pub Vec<f64>);

fn parse_state(s: &str) -> Result<State, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number '{t}': {e}"))
        })
        .collect::<Result<_, _>>()
        .map(State)
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: NsfdError| e.to_string())
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    Strict(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Strict(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Strict(m) => write!(f, "strict check failed: {m}"),
        }
    }
}

impl From<NsfdError> for CliError {
    fn from(e: NsfdError) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    use commands::*;
    match cli.command {
        Command::Simulate {
            model,
            x0,
            h,
            steps,
            t_final,
            scheme,
            precision,
            out,
        } => simulate(&model, &x0.0, h, steps, t_final, scheme, precision, &out),
        Command::StepBound { model, h_max, out } => step_bound(&model, h_max, &out),
        Command::Order {
            model,
            x0,
            t_final,
            h,
            scheme,
            out,
        } => order(&model, &x0.0, t_final, h, scheme, &out),
        Command::Stability {
            model,
            seeds,
            h,
            strict,
            out,
        } => {
            let seeds: Vec<Vec<f64>> = seeds.into_iter().map(|s| s.0).collect();
            stability(&model, &seeds, h, strict, &out)
        }
        Command::Invariance {
            model,
            h,
            trials,
            steps,
            seed,
            samples,
            scheme,
            strict,
            out,
        } => invariance(
            &model,
            &InvarianceArgs {
                h,
                trials,
                steps,
                seed,
                samples,
                scheme,
            },
            strict,
            &out,
        ),
        Command::Reversibility {
            model,
            h,
            trials,
            seed,
            x0,
            strict,
            out,
        } => reversibility(
            &model,
            h,
            trials,
            seed,
            x0.map(|s| s.0).as_deref(),
            strict,
            &out,
        ),
        Command::ExportModel { model, out } => export_model(&model, &out),
        Command::Validate { model, strict, out } => validate(&model, strict, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
