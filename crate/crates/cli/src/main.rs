mod args;
mod commands;
mod error;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use error::CliError;

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write { path: "standard output".into(), source }),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help/--version
    let Cli { output, command } = Cli::parse();
    let result = commands::run(command).and_then(|out| {
        emit(output.as_deref(), &out.text)?;
        Ok(out.failure)
    });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(witnesses)) => {
            eprintln!("verification failed: {witnesses}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
