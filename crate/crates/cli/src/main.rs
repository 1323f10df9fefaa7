//! `kacroots`: command-line driver for the Monte Carlo experiments,
//! Gaussian quadrature and exact oracles.
//!
//! Exit codes: 0 success, 1 usage or runtime error, 2 infeasible by parity
//! certificate, 3 resource guard.

mod args;
mod commands;
mod config;
mod output;
mod parse;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Context;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<kac_core::Error>()) {
        Some(kac_core::Error::Infeasible(_)) => 2,
        Some(kac_core::Error::ResourceLimit(_)) => 3,
        _ => 1,
    }
}

fn run(cli: Cli, argv: Vec<String>) -> anyhow::Result<()> {
    let threads = match cli.threads {
        Some(0) => anyhow::bail!("--threads must be at least 1"),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    let ctx = Context { threads, argv };
    pool.install(|| match &cli.command {
        Command::Simulate(a) => commands::simulate(a, &ctx),
        Command::Ek(a) => commands::ek(a, &ctx),
        Command::Exact { oracle } => commands::exact_cmd(oracle, &ctx),
    })
}

fn main() -> ExitCode {
    let mut args: Vec<OsString> = std::env::args_os().collect();
    if let Some(path) = config::config_path(&args) {
        match config::read_entries(path.as_ref()) {
            Ok(entries) => args = config::merge(args, &entries),
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
        }
    }
    let argv: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
