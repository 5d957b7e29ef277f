use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use qwl_cli::{run, Cli, CliError};

fn emit(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| emit(&cli, &outcome.text).map(|_| outcome.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("qwl: report written, but some checks failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("qwl: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
