//! Command-line front end: layered configuration, subcommand dispatch, and
//! deterministic artifact emission.

pub mod commands;
pub mod config;

use clap::{Parser, Subcommand};
use driftlab_core::Result;
use std::path::PathBuf;

pub use commands::{cmd_cluster, cmd_report, cmd_run, cmd_validate_drift};
pub use config::{load_config, resolve, Config};

#[derive(Debug, Parser)]
#[command(
    name = "driftlab",
    version,
    about = "Drifting bandit lab: UCB-family policies under abrupt and gradual reward drift"
)]
pub struct Cli {
    /// TOML config file; built-in desk-scale defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Dotted-path config override, e.g. --set policies.gamma=0.99
    /// (repeatable; wins over the config file).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Output directory (the run directory for `report`).
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the scenario x policy x run experiment matrix.
    Run,
    /// Cluster MovieLens-style users into arms and emit elbow diagnostics.
    Cluster,
    /// Check every scenario's drift analytically and export true-mean
    /// trajectories.
    ValidateDrift,
    /// Render summary.csv and curve files from a finished run directory.
    Report,
}

pub fn run(cli: &Cli) -> Result<()> {
    match cli.command {
        Command::Report => cmd_report(&cli.out),
        ref cmd => {
            let config = load_config(cli.config.as_deref(), &cli.set)?;
            match cmd {
                Command::Run => cmd_run(&config, &cli.out).map(|_| ()),
                Command::Cluster => cmd_cluster(&config, &cli.out),
                Command::ValidateDrift => cmd_validate_drift(&config, &cli.out),
                Command::Report => unreachable!("handled above"),
            }
        }
    }
}
