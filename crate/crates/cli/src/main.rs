//! `thue`: command-line front end.
//!
//! Exit status: 0 success, 2 usage error, 3 domain error (input outside a
//! method's range), 4 internal error. Results go to stdout; timing, cache
//! and thread information go to stderr so stdout is reproducible.

mod args;
mod cache;
mod config;
mod error;
mod output;
mod run;

use std::io;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::args::Cli;
use crate::cache::Cache;
use crate::error::{CliError, EXIT_INTERNAL, EXIT_USAGE};

fn execute(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let mut cache = Cache::new(cli.global.cache_dir.clone())?;
    let outcome = with_threads(cli.global.threads, || {
        run::run(&cli.command, cli.global.seed, &mut cache)
    })?;
    let stdout = io::stdout();
    output::render(&outcome.records, cli.global.format, &mut stdout.lock())?;
    eprintln!(
        "{}: {:.3} s, threads {}, cache hits {} misses {}",
        cli.command.path(),
        start.elapsed().as_secs_f64(),
        cli.global.threads.map_or("default".to_string(), |t| t.to_string()),
        cache.stats.hits,
        cache.stats.misses,
    );
    Ok(())
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<R, CliError> + Send,
) -> Result<R, CliError> {
    match threads {
        Some(0) => Err(CliError::Usage("threads: must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Core(thue_core::Error::Internal(e.to_string())))?
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<R, CliError> + Send,
) -> Result<R, CliError> {
    if threads == Some(0) {
        return Err(CliError::Usage("threads: must be at least 1".into()));
    }
    f()
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            ExitCode::from(if (1..=255).contains(&code) {
                code as u8
            } else {
                EXIT_INTERNAL as u8
            })
        }
    }
}
