//! `qek`: dataset inspection, features, kernels, benchmarks and the
//! analytic and noise experiments.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::{ConfigError, RunConfig};
use crate::output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "qek", version, about = "Quantum evolution graph kernel experiments")]
struct Cli {
    /// TOML or JSON run configuration.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set features.shots=1000`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory (overrides `output_dir`).
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `threads`).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also write CSV data for external plotting.
    #[arg(long, global = true)]
    emit_plot_data: bool,
    /// More log output; repeat for debug.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Sample and class counts after preprocessing.
    DatasetInfo,
    /// One probability distribution per graph.
    Features,
    /// Gram matrix of the QE kernel.
    Kernel,
    /// Trained QE kernel against graphlet and random-walk baselines.
    Benchmark,
    /// Closed-form depth-1 Ising experiment on random graphs.
    DemoAnalytic,
    /// Kernel change under detection errors.
    NoiseStudy,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

fn is_config_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<ConfigError>().is_some()
            || matches!(c.downcast_ref::<qek_core::Error>(), Some(qek_core::Error::Config(_)))
    })
}

fn setup_threads(threads: Option<usize>) -> anyhow::Result<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(ConfigError("threads must be at least 1".into()).into());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError(format!("thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    log::warn!("built without the parallel feature; ignoring {n} threads");
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let mut config = RunConfig::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    setup_threads(config.threads)?;
    let out = OutputDir::create(&config.output_dir)?;
    out.json("resolved_config.json", &config)?;
    let ctx = Context {
        config,
        out,
        emit_plot_data: cli.emit_plot_data,
    };
    match cli.command {
        Command::DatasetInfo => commands::dataset_info(&ctx),
        Command::Features => commands::features(&ctx),
        Command::Kernel => commands::kernel(&ctx),
        Command::Benchmark => commands::benchmark(&ctx),
        Command::DemoAnalytic => commands::demo_analytic(&ctx),
        Command::NoiseStudy => commands::noise_study(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_config_error(&e) { EXIT_CONFIG } else { EXIT_COMPUTE })
        }
    }
}
