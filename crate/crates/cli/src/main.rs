//! `matchless`: solve, verify, scan and report from the command line.

mod args;
mod campaign;
mod inspect;
mod outcome;
mod scan;
mod solve;
mod verify;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command, Globals};
use outcome::{CliError, Envelope, Outcome, EXIT_USAGE};

/// Runs one parsed command.
pub fn dispatch(cmd: &Command, g: &Globals) -> Result<Outcome, CliError> {
    match cmd {
        Command::Solve(a) => solve::run(a, g),
        Command::Verify(a) => verify::run(a, g),
        Command::Scan(a) => scan::run(a, g),
        Command::Formula(a) => inspect::formula(a),
        Command::Stats(a) => inspect::stats(a, g),
        Command::Circle(a) => inspect::circle(a, g),
        Command::Construct(a) => inspect::construct(a),
        Command::Run(a) => campaign::run(a, g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(threads) = cli.globals.threads {
        // a second initialisation only happens in tests; ignoring it is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let start = Instant::now();
    let result = dispatch(&cli.command, &cli.globals);
    let wall_ms = start.elapsed().as_millis() as u64;
    let line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    match result {
        Ok(outcome) => {
            let code = outcome.status.exit_code();
            let envelope = Envelope::new(line, &cli.globals, &outcome, wall_ms);
            if let Err(e) = outcome::emit(&envelope, &outcome, cli.globals.json_target()) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let (Some(Some(path)), CliError::Failed(_)) = (cli.globals.json_target(), &e) {
                let _ = outcome::write_error(path, &line, &cli.globals, &e.to_string(), wall_ms);
            }
            ExitCode::from(e.exit_code())
        }
    }
}
