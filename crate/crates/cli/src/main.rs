//! `oracle-game`: closed-form analysis, simulation and experiment reports.
//!
//! Exit status is 0 on success, 1 when a report contains a FAIL row, and 2
//! on a configuration, usage or I/O error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oracle_game::config::ConfigFile;
use thiserror::Error;

use commands::Status;
use output::{Format, Output, VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    fn output(e: impl std::fmt::Display) -> Self {
        CliError::Output(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "oracle-game", version = VERSION, about = "Oracle game analysis and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; defaults apply to everything it omits.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent. Side tables go to `<stem>_<name>.csv`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: Format,
    /// Overrides every master seed in the file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides every trial count in the file.
    #[arg(long, global = true)]
    trials: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form manipulation probabilities and bounty caps.
    Analyze {
        /// Check the twelve built-in reference rows.
        #[arg(long = "builtin-table5")]
        builtin: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the scenario's population and reports per-trial statistics.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Compares simulated manipulation rates with the closed form.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Unilateral-deviation payoffs against honest play.
    Equilibrium {
        #[command(flatten)]
        common: Common,
    },
    /// Reward-pool trajectory under pool-aware certification.
    Pools {
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common) -> Result<ConfigFile, CliError> {
    let mut config = match &common.config {
        Some(path) => ConfigFile::load(path).map_err(|e| CliError::Config(e.to_string()))?,
        None => ConfigFile::default(),
    };
    config.override_run(common.seed, common.trials);
    Ok(config)
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let (common, builtin) = match &cli.command {
        Command::Analyze { builtin, common } => (common, *builtin),
        Command::Simulate { common }
        | Command::Verify { common }
        | Command::Equilibrium { common }
        | Command::Pools { common } => (common, false),
    };
    let config = load(common)?;
    let out = Output {
        path: common.out.clone(),
        format: common.format,
    };
    match cli.command {
        Command::Analyze { .. } => commands::analyze(&config, builtin, &out),
        Command::Simulate { .. } => commands::simulate(&config, &out),
        Command::Verify { .. } => commands::verify_cmd(&config, &out),
        Command::Equilibrium { .. } => commands::equilibrium(&config, &out),
        Command::Pools { .. } => commands::pools(&config, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
