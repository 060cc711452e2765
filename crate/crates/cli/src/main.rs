//! Batch JSON interface to the padic-fourier kernel.
//!
//! Every command reads one JSON payload (`--json <file|->`) and prints one
//! JSON document. Exit status is 0 on success, 1 on a domain error (printed as
//! `{"error": {"kind", "module", "message"}}`) and 2 on a usage error.

mod commands;

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "padic-fourier", version, about = "p-adic Fourier theory kernel: JSON in, JSON out")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Working precision in π-adic digits (overrides the payload).
    #[arg(long, global = true)]
    pub prec: Option<i64>,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Truncation degree for series and D_W tables.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Level (torsion level, coset level).
    #[arg(long, global = true)]
    pub level: Option<u32>,
    /// Input payload: a file path, or `-` for stdin.
    #[arg(long, global = true, value_name = "FILE|-")]
    pub json: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a field and optionally run one arithmetic operation.
    Field,
    /// Amice transforms of distributions.
    Amice {
        #[arg(value_enum)]
        op: AmiceOp,
    },
    /// Characters and differential conditions.
    Char {
        #[arg(value_enum)]
        op: CharOp,
    },
    /// Σ-analyticity and Hodge–Tate pairs of CM types.
    Sigma,
    /// Lubin–Tate formal groups.
    Lt {
        #[arg(value_enum)]
        op: LtOp,
    },
    /// Run a named property suite.
    Selftest {
        #[arg(long)]
        suite: String,
        /// Override the suite's case count.
        #[arg(long)]
        cases: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum AmiceOp {
    Dirac,
    Convolve,
    Moments,
    Eval,
    MultX,
    Twist,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CharOp {
    Eval,
    Mul,
    Member,
    Torsion,
    Pullback,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum LtOp {
    Construct,
    Endo,
    Log,
    Newton,
    Torsion,
}

/// Failures before dispatch that are the caller's fault (exit 2).
#[derive(Debug)]
pub struct UsageError(pub String);

fn read_payload(g: &Global, required: bool) -> Result<Value, UsageError> {
    let Some(src) = &g.json else {
        return if required {
            Err(UsageError("--json <file|-> is required for this command".into()))
        } else {
            Ok(Value::Null)
        };
    };
    let mut text = String::new();
    if src == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| UsageError(format!("--json -: {e}")))?;
    } else {
        text = std::fs::read_to_string(src).map_err(|e| UsageError(format!("--json {src}: {e}")))?;
    }
    serde_json::from_str(&text).map_err(|e| UsageError(format!("--json {src}: invalid JSON: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let needs_payload = !matches!(cli.command, Command::Selftest { .. });
    let payload = match read_payload(&cli.global, needs_payload) {
        Ok(v) => v,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let (doc, code) = match commands::dispatch(&cli.command, &cli.global, &payload) {
        Ok(out) => (out, ExitCode::SUCCESS),
        Err(e) => (json!({"error": {"kind": e.kind(), "module": e.module(), "message": e.to_string()}}), ExitCode::from(1)),
    };
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    // A closed pipe downstream is not our failure.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    code
}
