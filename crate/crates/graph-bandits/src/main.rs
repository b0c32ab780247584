use std::io;
use std::process::ExitCode;

use graph_bandits::harness::{run_cli, CliError};

fn main() -> ExitCode {
    let mut stdout = io::stdout().lock();
    match run_cli(std::env::args_os(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("{message}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
