use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hh_interval_cli::{run, Cli, CliError};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|(outcome, out)| {
        match out {
            Some(path) => std::fs::write(&path, &outcome.output)
                .map_err(|source| CliError::Output { path, source })?,
            None => {
                let mut stdout = std::io::stdout().lock();
                // a closed pipe is not worth a distinct exit code
                let _ = stdout.write_all(outcome.output.as_bytes());
            }
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
