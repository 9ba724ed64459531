mod cli;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use cli::args::Cli;
use cli::config::{merge, ConfigError};

fn main() -> ExitCode {
    let argv: Vec<_> = std::env::args_os().collect();
    let argv = match merge(&Cli::command(), argv) {
        Ok(a) => a,
        Err(ConfigError::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(1);
        }
        Err(ConfigError::Io(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| cli::commands::run(cli)),
            Err(e) => {
                eprintln!("error: cannot start thread pool: {e}");
                return ExitCode::from(2);
            }
        },
        None => cli::commands::run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
