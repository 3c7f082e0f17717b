use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use rotosense::{error_line, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.kind().as_str().unwrap_or("invalid arguments");
            let detail = e.to_string();
            let first = detail
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ")
                .trim();
            let line = if first.is_empty() { msg } else { first };
            eprintln!("error: {line}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, |w| eprintln!("warning: {w}")) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
