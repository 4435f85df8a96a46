//! `block-casimir`: spectra, field variances, total Casimir energy,
//! Kramers-Kronig and verification reports for a dispersive block.
//!
//! Exit status: 0 success, 1 usage or I/O error, 2 numerical failure.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Status;
use crate::config::{CommonArgs, ExtraArgs, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "block-casimir", version, about = "Zero-point energy spectra and Casimir energy of a dispersive block")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// W, W_free, W_bulk and W_C over the frequency grid
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Field variance and energy densities along x at one frequency
    Variance {
        #[command(flatten)]
        common: CommonArgs,
        /// Frequency in eV
        #[arg(long)]
        omega: Option<f64>,
        /// Positions start:stop:count in eV^-1 (default -L/2 to 3L/2)
        #[arg(long, allow_hyphen_values = true)]
        positions: Option<String>,
    },
    /// Total Casimir energy for one or more lengths
    TotalEnergy {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated lengths with units, e.g. 0.1um,1um,10um
        #[arg(long)]
        lengths: Option<String>,
    },
    /// Reconstructs Re eps - 1 from Im eps by a Hilbert transform
    KkCheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Upper end of the dispersion integral in eV
        #[arg(long)]
        cutoff: Option<f64>,
    },
    /// Runs every oracle check; both presets unless --material is given
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated lengths with units (default 1um,10um)
        #[arg(long)]
        lengths: Option<String>,
        /// Test hook: flips the sign of alpha in the energy-density path
        #[arg(long, hide = true)]
        corrupt_alpha_sign: bool,
    },
}

fn run(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Spectrum { common } => commands::spectrum(&RunConfig::resolve(&common, &ExtraArgs::default())?),
        Command::Variance {
            common,
            omega,
            positions,
        } => {
            let extra = ExtraArgs {
                omega,
                positions,
                ..ExtraArgs::default()
            };
            commands::variance(&RunConfig::resolve(&common, &extra)?)
        }
        Command::TotalEnergy { common, lengths } => {
            let extra = ExtraArgs {
                lengths,
                ..ExtraArgs::default()
            };
            commands::total_energy(&RunConfig::resolve(&common, &extra)?)
        }
        Command::KkCheck { common, cutoff } => {
            let extra = ExtraArgs {
                cutoff,
                ..ExtraArgs::default()
            };
            commands::kk_check(&RunConfig::resolve(&common, &extra)?)
        }
        Command::Verify {
            common,
            lengths,
            corrupt_alpha_sign,
        } => {
            let extra = ExtraArgs {
                lengths,
                ..ExtraArgs::default()
            };
            commands::verify(&RunConfig::resolve(&common, &extra)?, corrupt_alpha_sign)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Flagged(reason)) => {
            eprintln!("block-casimir: numerical failure: {reason}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("block-casimir: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
