mod args;
mod bench;
mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
}

impl From<altsum_core::Error> for CliError {
    fn from(e: altsum_core::Error) -> Self {
        use altsum_core::Error as E;
        match e {
            E::Parse(_)
            | E::InvalidFlag(_)
            | E::InvalidOrder(_)
            | E::OrderMismatch { .. }
            | E::DimensionMismatch { .. } => CliError::Usage(e.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn thread_count(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("ALTSUM_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "ALTSUM_THREADS must be a positive integer, got {v:?}"
                ))
            }),
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = thread_count(cli.global.threads)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Compute(e.to_string()))?;
    }
    let g = &cli.global;
    let report = match &cli.command {
        Command::Coeffs(a) => commands::coeffs(g, a)?,
        Command::Sum(a) => commands::sum(g, a)?,
        Command::Series(a) => commands::series(g, a)?,
        Command::Bound(a) => commands::bound(g, a)?,
        Command::Decompose(a) => commands::decompose(g, a)?,
        Command::Polytope(a) => commands::polytope(g, a)?,
        Command::Bench(a) => bench::bench(g, a)?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match report.write(g.format, &mut out).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            Err(CliError::Compute(format!("writing output: {e}")))
        }
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
