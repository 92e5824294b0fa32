//! `gl-kramers` command-line interface.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::config::{resolve, usage, Cli, Command, UsageError};

const THREADS_ENV: &str = "KRAMERS_GL_THREADS";

fn configure_threads() -> anyhow::Result<()> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize =
        text.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            usage(format!("invalid value for `{THREADS_ENV}`: {text:?} (expected a positive integer)"))
        })?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let resolved = resolve(cli.command.args())?;
    match &cli.command {
        Command::Rate(_) => commands::rate(&resolved)?,
        Command::Sweep(_) => commands::sweep(&resolved)?,
        Command::Profile(_) => commands::profile(&resolved)?,
        Command::Spectrum(_) => commands::spectrum(&resolved)?,
        Command::Mfpt(_) => commands::mfpt(&resolved)?,
        Command::Verify(_) => return commands::verify(&resolved),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            let command = cli.command.name();
            if err.downcast_ref::<UsageError>().is_some() {
                eprintln!("gl-kramers {command}: usage error: {err}");
                ExitCode::from(2)
            } else {
                eprintln!("gl-kramers {command}: error: {err:#}");
                ExitCode::FAILURE
            }
        }
    }
}
