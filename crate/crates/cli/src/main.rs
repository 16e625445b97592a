use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(
    name = "macjscc",
    version,
    about = "Error exponents for two-user joint source-channel coding with class-dependent codebooks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Model file or built-in fixture name.
    #[arg(value_name = "MODEL")]
    model_arg: Option<String>,
    /// Model file or built-in fixture name (alternative to the positional form).
    #[arg(
        long = "model",
        value_name = "PATH|FIXTURE",
        conflicts_with = "model_arg"
    )]
    model_flag: Option<String>,
    /// Fixed thresholds; skips the threshold search.
    #[arg(long, num_args = 2, value_names = ["G1", "G2"], allow_negative_numbers = true)]
    gamma: Option<Vec<f64>>,
    /// Points per axis of the threshold grid (search grid, or sweep resolution).
    #[arg(long)]
    grid: Option<usize>,
    /// Samples for the concave envelopes of the upper bound.
    #[arg(long, default_value_t = 1025)]
    hull_grid: usize,
    /// Stopping width of the threshold bisection.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Worker threads for grid evaluations.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Report exponents in bits instead of nats.
    #[arg(long)]
    bits: bool,
    /// Threshold solver.
    #[arg(long, default_value = "nested-bisection")]
    solver: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Achievable exponent, optimal thresholds and both bounds.
    Exponent {
        #[command(flatten)]
        common: Common,
        /// Print only one quantity (achievable, lower or upper).
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Lower and upper bounds with their per-error-type tables.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Optimal thresholds and solver diagnostics.
    Thresholds {
        #[command(flatten)]
        common: Common,
    },
    /// Objective tables at the thresholds, and the lower and upper bound tables, as CSV.
    Tables {
        #[command(flatten)]
        common: Common,
    },
    /// CSV of d over a threshold grid, or of one objective over rho.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Sweep rho for a single cell instead of the thresholds.
        #[arg(long)]
        rho: bool,
        /// Error type for --rho.
        #[arg(long, value_enum, default_value_t = TauArg::Both)]
        tau: TauArg,
        /// Class pair for --rho.
        #[arg(long, num_args = 2, value_names = ["I1", "I2"], default_values_t = [1, 1])]
        classes: Vec<usize>,
    },
    /// Cross-check the engine against the brute-force reference evaluators.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Parse and validate a model.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TauArg {
    #[value(name = "1")]
    User1,
    #[value(name = "2")]
    User2,
    Both,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut out = String::new();
    match commands::run(cli.command, &mut out) {
        Ok(code) => {
            print!("{out}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
