//! `gfl`: train a recurrent health classifier over a federation of data
//! holders, synthesize the tabular data they hold, and account for every
//! second and joule the run spends.

mod artifacts;
mod commands;
mod config;
mod error;

use std::path::PathBuf;

use clap::Parser;

use crate::artifacts::{default_run_id, RunDirs};
use crate::commands::{eval, partition, report, respond, synth, train};
use crate::config::{Backend, RunConfig};
use crate::error::{CliError, Result};
use gfl_runtime::Protocol;

#[derive(Debug, Parser)]
#[command(
    name = "gfl",
    version,
    about = "Federated training of a recurrent classifier over synthetic tabular health data"
)]
struct Cli {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; every random stream in the pipeline derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root; each run writes under `<out>/<run-id>/`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run directory name under the output root.
    #[arg(long, global = true)]
    run_id: Option<String>,
    /// Transport backend for training runs.
    #[arg(long, global = true, value_enum)]
    backend: Option<Backend>,
    /// Seconds per model-bearing hop on the simulated network; for
    /// `respond`, the full request round trip.
    #[arg(long, global = true)]
    latency: Option<f64>,
    /// Edge node power draw, watts.
    #[arg(long = "e-edge", global = true)]
    e_edge: Option<f64>,
    /// Cloud node power draw, watts.
    #[arg(long = "e-cloud", global = true)]
    e_cloud: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// Train the tabular GAN and write a synthetic dataset.
    Synth(synth::SynthArgs),
    /// Hold out a shared test set and split the rest across clients.
    Partition(partition::PartitionArgs),
    /// Run centralized federated training (clients train, a server averages).
    Cfl(train::TrainArgs),
    /// Run decentralized federated training (nodes average their neighbors).
    Dfl(train::TrainArgs),
    /// Score checkpoints on datasets, or train the pooled comparison model.
    Eval(eval::EvalArgs),
    /// Serve prediction requests from a checkpoint and time the responses.
    Respond(respond::RespondArgs),
    /// Re-rate a recorded time ledger into energy.
    Report(report::ReportArgs),
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    if let Some(run_id) = &cli.run_id {
        config.run_id = Some(run_id.clone());
    }
    if let Some(backend) = cli.backend {
        config.backend = backend;
    }
    if let Some(latency) = cli.latency {
        config.latency_secs = latency;
    }
    if let Some(watts) = cli.e_edge {
        config.edge_watts = watts;
    }
    if let Some(watts) = cli.e_cloud {
        config.cloud_watts = watts;
    }
    if !config.latency_secs.is_finite() || config.latency_secs < 0.0 {
        return Err(CliError::validation(format!(
            "latency must be finite and non-negative, got {}",
            config.latency_secs
        )));
    }
    config.power_rates()?;
    Ok(config)
}

fn dispatch(cli: &Cli) -> Result<()> {
    let config = resolve_config(cli)?;
    let run_id = config
        .run_id
        .clone()
        .unwrap_or_else(|| default_run_id(config.seed));
    let dirs = RunDirs::prepare(&config.out, &run_id)?;
    match &cli.command {
        Command::Synth(args) => synth::run(config, args, &dirs),
        Command::Partition(args) => partition::run(config, args, &dirs),
        Command::Cfl(args) => train::run(config, args, &dirs, Protocol::Centralized),
        Command::Dfl(args) => train::run(config, args, &dirs, Protocol::Decentralized),
        Command::Eval(args) => eval::run(config, args, &dirs),
        Command::Respond(args) => respond::run(args, &dirs, cli.latency),
        Command::Report(args) => report::run(config, args, &dirs),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = dispatch(&cli) {
        eprintln!("error: {error}");
        std::process::exit(error.exit_code());
    }
}
