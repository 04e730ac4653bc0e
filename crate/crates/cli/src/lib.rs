//! Command-line front end: JSON documents in, JSON reports out.
//!
//! Exit status is 0 when the verdict holds, 1 when it is mathematically
//! refuted and 2 on malformed input.

pub mod commands;
pub mod config;
pub mod format;

use clap::Parser;

pub use commands::{run, Command, FactorKind, Report};
pub use config::JobConfig;

#[derive(Debug, Parser)]
#[command(name = "sigma-nabla", version, about = "Checks for p-adic (sigma, nabla)-modules, Frobenius data and L-functions")]
pub struct Cli {
    #[command(flatten)]
    pub config: JobConfig,
    #[command(subcommand)]
    pub command: Command,
}
