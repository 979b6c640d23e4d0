use std::process::ExitCode;

use clap::Parser;
use pqapprox_cli::{execute, Cli};

fn main() -> ExitCode {
    // clap exits with status 2 on malformed arguments
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pqapprox: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
