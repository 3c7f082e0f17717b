//! File formats, parallel trials and the command-line front end for
//! [`rotosense_core`].

pub mod commands;
pub mod config;
pub mod formats;
pub mod runner;

use std::io::Write;

use anyhow::{Context, Result};

pub use config::{Cli, Command, RunConfig};

/// Resolves the configuration, runs the command and writes its report.
/// Warnings go to `warn`.
pub fn run(cli: &Cli, mut warn: impl FnMut(&str)) -> Result<()> {
    let cfg = RunConfig::resolve(cli.command, &cli.flags)?;
    for w in cfg.warnings() {
        warn(&w);
    }
    let text = commands::execute(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// One-line rendering of an error and its causes.
pub fn error_line(e: &anyhow::Error) -> String {
    let joined = e
        .chain()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(": ");
    joined.split_whitespace().collect::<Vec<_>>().join(" ")
}
