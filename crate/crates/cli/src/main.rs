//! `drwk`: command-line front end. Every command prints either a short text
//! rendering or (with `--json`) one JSON object per line carrying `"schema": 1`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

mod commands;
mod input;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::{drw::DrwCmd, kth::KthCmd, residue::ResidueCmd, semilinear::SemilinearCmd, suite::SuiteArgs, witt::WittCmd};

#[derive(Parser)]
#[command(name = "drwk", version, about = "Exact Witt vector, de Rham-Witt, residue, semilinear and Milnor K computations")]
struct Cli {
    /// Emit line-delimited JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated Witt vector arithmetic.
    #[command(subcommand)]
    Witt(WittCmd),
    /// Top-degree de Rham-Witt forms and Cartier operators.
    #[command(subcommand)]
    Drw(DrwCmd),
    /// Residue symbols over Q[Y] or Z/p^N.
    #[command(subcommand)]
    Residue(ResidueCmd),
    /// Frobenius-semilinear maps over F_q and W_n(F_q).
    #[command(subcommand)]
    Semilinear(SemilinearCmd),
    /// Tame symbols, norms, reciprocity and the Gersten complex of a curve.
    #[command(subcommand)]
    Kth(KthCmd),
    /// Run the acceptance suites.
    Suite(SuiteArgs),
}

/// What a command produced: JSON records, their text rendering, and whether
/// the verification it performed (if any) passed.
pub struct Output {
    pub records: Vec<Value>,
    pub text: Vec<String>,
    pub ok: bool,
}

impl Output {
    pub fn one(record: Value, text: impl Into<String>) -> Output {
        Output { records: vec![record], text: vec![text.into()], ok: true }
    }

    pub fn verdict(mut self, ok: bool) -> Output {
        self.ok = ok;
        self
    }
}

/// Input problems the library does not see (malformed flags, JSON, ...).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage<T>(msg: impl Into<String>) -> anyhow::Result<T> {
    Err(UsageError(msg.into()).into())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() || e.downcast_ref::<serde_json::Error>().is_some() {
        return 2;
    }
    match e.downcast_ref::<drwk::Error>() {
        Some(drwk::Error::Integrality(_) | drwk::Error::Consistency(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn run(cli: Cli) -> anyhow::Result<(&'static str, Output)> {
    Ok(match cli.command {
        Command::Witt(c) => ("witt", commands::witt::run(c)?),
        Command::Drw(c) => ("drw", commands::drw::run(c)?),
        Command::Residue(c) => ("residue", commands::residue::run(c)?),
        Command::Semilinear(c) => ("semilinear", commands::semilinear::run(c)?),
        Command::Kth(c) => ("kth", commands::kth::run(c)?),
        Command::Suite(a) => ("suite", commands::suite::run(a)?),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok((command, out)) => {
            if json {
                for r in out.records {
                    let mut obj = json!({ "schema": 1, "command": command });
                    if let (Value::Object(dst), Value::Object(src)) = (&mut obj, r) {
                        dst.extend(src);
                    }
                    println!("{obj}");
                }
            } else {
                for line in out.text {
                    println!("{line}");
                }
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            let code = exit_code(&e);
            if json {
                println!("{}", json!({ "schema": 1, "error": format!("{e:#}"), "exit_code": code }));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}
