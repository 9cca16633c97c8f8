//! `qklab`: command-line front end for the `qklab-core` solvers.
//!
//! Exit codes: 0 all checks passed, 1 a check failed or a solver returned an
//! error, 2 usage error, 3 I/O error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command, Format};
use output::{Artifacts, CliError, Report};

fn run(cli: &Cli) -> Result<Report, CliError> {
    if cli.plot_script && cli.format == Format::Json {
        return Err(CliError::Usage("--plot-script reads CSV profiles; use --format csv".into()));
    }
    let out = Artifacts::new(&cli.output_dir, cli.format, cli.plot_script)?;
    let echo = json!({
        "command": cli.command,
        "format": cli.format,
        "plot_script": cli.plot_script,
    });
    match &cli.command {
        Command::Solve(a) => commands::solve(a, &out, echo),
        Command::Picard(a) => commands::picard(a, &out, echo),
        Command::Verify(a) => verify::verify(a, &out, echo),
        Command::Barriers(a) => commands::barriers(a, &out, echo),
        Command::Tangency(a) => commands::tangency(a, &out, echo),
        Command::Sweep(a) => commands::sweep(a, &out, echo),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            for c in &report.checks {
                let mark = match (c.passed, c.informational) {
                    (true, _) => "ok",
                    (false, true) => "note",
                    (false, false) => "FAIL",
                };
                println!("[{mark}] {} = {:e}", c.name, c.value);
            }
            if let Some(r) = report.blow_up_radius {
                println!("blow_up_radius = {r:.10}");
            }
            if report.passed() {
                println!("{}: all checks passed", cli.command.name());
                ExitCode::SUCCESS
            } else {
                println!("{}: some checks failed", cli.command.name());
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("qklab {}: {e}", cli.command.name());
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Io { .. } => 3,
                CliError::Numeric(_) => 1,
            })
        }
    }
}
