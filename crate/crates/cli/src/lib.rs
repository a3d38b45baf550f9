//! The `cyclochron` command line. [`run`] takes an argument vector and
//! returns the exit code with everything that would be written to stdout
//! and stderr, so the binary and the tests share one code path.

mod args;
mod commands;
mod output;

use std::fs::File;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use cyclochron_core::constants::{
    constants_from_config, default_particle_table, load_particle_table,
};
use cyclochron_core::{Error, Result};
use serde_json::{json, Value};

pub use args::{Cli, Format};

/// Bumped only on breaking changes to any payload.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the selected subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => return clap_outcome(e),
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(e) => error_outcome(&e),
    }
}

fn clap_outcome(e: clap::Error) -> Outcome {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
            code: EXIT_OK,
            stdout: e.to_string(),
            stderr: String::new(),
        },
        _ => {
            let text = e.render().to_string();
            let body = json!({
                "error": {
                    "kind": "usage",
                    "message": text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: "),
                    "usage": text,
                }
            });
            Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("{body}\n"),
            }
        }
    }
}

pub(crate) fn error_outcome(e: &Error) -> Outcome {
    let mut detail = json!({ "kind": e.kind(), "message": e.to_string() });
    match e {
        Error::Parse { line, .. } => detail["line"] = json!(line),
        Error::PhysicalValidity { event, clock, .. } => {
            detail["event"] = json!(event);
            detail["clock"] = json!(clock);
        }
        Error::NotFound {
            horizon,
            best_time,
            best_distance,
        } => {
            detail["horizon"] = output::num(*horizon);
            detail["best_time"] = output::num(*best_time);
            detail["best_distance"] = output::num(*best_distance);
        }
        _ => {}
    }
    Outcome {
        code: if matches!(e, Error::Usage(_)) {
            EXIT_USAGE
        } else {
            EXIT_FAILURE
        },
        stdout: String::new(),
        stderr: format!("{}\n", json!({ "error": detail })),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Usage(format!("cannot open `{}`: {e}", path.display())))
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let k = constants_from_config(cli.constants.as_deref().map(open).transpose()?)?;
    let table = match &cli.particles {
        Some(path) => load_particle_table(open(path)?)?,
        None => default_particle_table(),
    };
    let ctx = commands::Context {
        k,
        table,
        seed: cli.seed,
    };
    let report = commands::dispatch(&cli.command, &ctx)?;
    let format = cli.format.unwrap_or(report.default_format);
    let stdout = match format {
        Format::Json => {
            let envelope = json!({
                "command": report.command,
                "constants_used": { "h": k.h, "c": k.c, "electronvolt": k.electronvolt },
                "payload": report.payload,
                "schema_version": SCHEMA_VERSION,
            });
            format!(
                "{}\n",
                serde_json::to_string_pretty(&envelope).expect("JSON values serialize")
            )
        }
        Format::Csv => match &report.table {
            Some(t) => output::write_csv(&t.0, &t.1),
            None => output::flatten_csv(&report.payload),
        },
    };
    Ok(Outcome {
        code: if report.failed { EXIT_FAILURE } else { EXIT_OK },
        stdout,
        stderr: String::new(),
    })
}

/// What a subcommand produced.
pub(crate) struct Report {
    pub command: &'static str,
    pub payload: Value,
    /// Header and rows for `--format csv`; the payload is flattened otherwise.
    pub table: Option<(Vec<String>, Vec<Vec<String>>)>,
    pub default_format: Format,
    /// Ran to completion but the check it performs did not pass.
    pub failed: bool,
}

impl Report {
    pub fn new(command: &'static str, payload: Value) -> Self {
        Report {
            command,
            payload,
            table: None,
            default_format: Format::Json,
            failed: false,
        }
    }

    pub fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header.iter().map(|s| s.to_string()).collect(), rows));
        self
    }
}
