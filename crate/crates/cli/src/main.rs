//! `spine`: build spine spaces, compute line relations, and run the
//! reconstruction and counterexample checks.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or gate
//! error.

mod cache;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::GateError;
use config::{ConfigArgs, RunConfig};

#[derive(Parser)]
#[command(
    name = "spine",
    version,
    about = "Spine spaces and the definability of points from line relations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export points, lines and strong subspaces.
    Build(ConfigArgs),
    /// Compute and export the coplanarity and pencil relations.
    Relations(ConfigArgs),
    /// Classify maximal cliques and test the exchange criterion.
    Cliques(ConfigArgs),
    /// Recover pencils from the stripped relation.
    Pencils(ConfigArgs),
    /// Reconstruct points from bundles and compare with the space.
    Reconstruct(ConfigArgs),
    /// Build the homology counterexample (w = k, m = k-1).
    Counterexample(ConfigArgs),
    /// Run every applicable check.
    VerifyAll(ConfigArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (
        &ConfigArgs,
        fn(&RunConfig) -> anyhow::Result<commands::Outcome>,
    ) = match &cli.command {
        Command::Build(a) => (a, commands::cmd_build),
        Command::Relations(a) => (a, commands::cmd_relations),
        Command::Cliques(a) => (a, commands::cmd_cliques),
        Command::Pencils(a) => (a, commands::cmd_pencils),
        Command::Reconstruct(a) => (a, commands::cmd_reconstruct),
        Command::Counterexample(a) => (a, commands::cmd_counterexample),
        Command::VerifyAll(a) => (a, commands::cmd_verify_all),
    };
    let result = RunConfig::resolve(args)
        .map_err(|e| GateError(format!("{e:#}")).into())
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(o) if o.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.downcast_ref::<GateError>().is_some()
                || matches!(
                    e.downcast_ref::<spine_core::Error>(),
                    Some(spine_core::Error::Config(_) | spine_core::Error::Unsupported(_))
                );
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
