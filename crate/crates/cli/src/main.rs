mod cli;
mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::Cli;
use crate::commands::{Failure, Outcome};

const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;
const EXIT_IO: u8 = 1;

fn parse(args: &[OsString]) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(args).map_err(|e| {
        let code = e.exit_code();
        let _ = e.print();
        ExitCode::from(code as u8)
    })
}

/// Splices the flags of `--config` in ahead of the command line.
fn apply_config(args: Vec<OsString>) -> Result<Vec<OsString>, ExitCode> {
    let Some(path) = config::config_path(&args) else {
        return Ok(args);
    };
    let fail = |msg: String| {
        eprintln!("error: {msg}");
        ExitCode::from(EXIT_INVALID)
    };
    let path = std::path::PathBuf::from(path);
    let text = fs::read_to_string(&path).map_err(|e| fail(format!("cannot read `--config` {}: {e}", path.display())))?;
    let flags = config::parse_config(&text).map_err(fail)?;
    config::splice(&args, &flags).ok_or_else(|| fail("no subcommand given".into()))
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<(), String> {
    let body = outcome.report.render(cli.global.format, cli.global.seed);
    let mut stdout = std::io::stdout().lock();
    if cli.global.format == cli::Format::Csv {
        if let Some(status) = &outcome.report.status {
            writeln!(stdout, "{status}").map_err(|e| e.to_string())?;
        }
    }
    match &cli.global.output {
        Some(path) => fs::write(path, body).map_err(|e| format!("cannot write `--output` {}: {e}", path.display())),
        None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    let args: Vec<OsString> = std::env::args_os().collect();
    let cli = match apply_config(args).and_then(|args| parse(&args)) {
        Ok(cli) => cli,
        Err(code) => return code,
    };

    let run = || commands::run(&cli.command, cli.global.seed);
    let result = match cli.global.threads {
        Some(0) => {
            eprintln!("error: `--threads` must be positive");
            return ExitCode::from(EXIT_INVALID);
        }
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: cannot start {threads} worker threads: {e}");
                return ExitCode::from(EXIT_IO);
            }
        },
        None => run(),
    };

    match result {
        Ok(outcome) => {
            if let Err(msg) = emit(&cli, &outcome) {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_IO);
            }
            match &outcome.verification_failure {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(EXIT_VERIFICATION)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(failure) => {
            let (code, msg) = match failure {
                Failure::Invalid(m) => (EXIT_INVALID, m),
                Failure::Budget(m) => (EXIT_BUDGET, m),
                Failure::Io(m) => (EXIT_IO, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
