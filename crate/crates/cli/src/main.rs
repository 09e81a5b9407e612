use std::path::PathBuf;
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{CommandFactory, FromArgMatches, Parser};
use mdiew_cli::{execute, Command, Format, RunConfig, DEFAULT_DRAWS, DEFAULT_SEED, SEED_ENV};
use mdiew_core::detection::{COINCIDENCE_WINDOW_NS, FITTED_JITTER_SIGMA_NS};

/// Entanglement witness, time-shift attack and MDI witness experiments.
///
/// Writes one table per run: a header row, one row per grid point and a
/// `#` metadata footer (CSV) or a `metadata` object (JSON).
#[derive(Debug, Parser)]
#[command(name = "mdiew", version)]
struct Cli {
    #[arg(long, value_enum)]
    command: Command,

    /// Base seed for every stochastic step.
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Trials per setting (shots per basis for tomography); 0 selects the
    /// analytic values only. Default 1000000, tomography 250000.
    #[arg(long)]
    trials: Option<u64>,

    /// Mixing parameter; repeatable. Default: 21-point grid on [0, 1].
    #[arg(long = "v")]
    v: Vec<f64>,

    /// Selector angle in degrees, v = cos²(2θ); repeatable.
    #[arg(long, allow_negative_numbers = true)]
    theta: Vec<f64>,

    /// Relative detector delay in ns; repeatable.
    #[arg(long = "delta-t", allow_negative_numbers = true)]
    delta_t: Vec<f64>,

    /// Coincidence window in ns.
    #[arg(long, default_value_t = COINCIDENCE_WINDOW_NS)]
    window: f64,

    /// Per-detector Gaussian timing jitter in ns.
    #[arg(long = "jitter-sigma", default_value_t = FITTED_JITTER_SIGMA_NS)]
    jitter_sigma: f64,

    /// Adversarial draws for mdiew-adversary.
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    draws: usize,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let matches = Cli::command().get_matches();
    let seed_source = match matches.value_source("seed") {
        Some(ValueSource::CommandLine) => "flag".to_string(),
        Some(ValueSource::EnvVariable) => format!("env {SEED_ENV}"),
        _ => "default".to_string(),
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let config = RunConfig {
        command: cli.command,
        seed: cli.seed,
        seed_source,
        trials: cli.trials,
        v: cli.v,
        theta: cli.theta,
        delta_t: cli.delta_t,
        window: cli.window,
        jitter_sigma: cli.jitter_sigma,
        draws: cli.draws,
        out: cli.out,
        format: cli.format,
    };
    match execute(&config) {
        Ok(text) => {
            if config.out.is_none() {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mdiew: {e}");
            ExitCode::FAILURE
        }
    }
}
