//! gaussmap: harmonicity analysis of Gauss maps for subspaces of metric Lie
//! algebras. Documents come in as JSON, reports go out as text or JSON, and
//! the exit code distinguishes schema problems (2), precondition violations
//! (3), and numerical failures (4).

mod builtin;
mod document;
mod error;
mod report;
mod tasks;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::builtin::builtin_document;
use crate::document::{emit, parse_document, AnalysisDocument};
use crate::error::CliError;
use crate::report::{render_json, render_text, run_report};
use crate::tasks::exit_code;

#[derive(Parser)]
#[command(
    name = "gaussmap",
    version,
    about = "Harmonicity analysis of Gauss maps on metric Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks requested by a JSON analysis document
    Analyze {
        /// Path to the document
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a named builtin example
    Builtin {
        /// One of: so3, so3xso3, heisenberg3, heisenberg5, euclidean,
        /// so3_plus_R, j_singular3
        name: String,
        /// Builtin parameter as k=v (a=<real> for so3xso3, n=<integer> for
        /// euclidean); repeatable
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Comparison tolerance (default 1e-9)
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for randomized ideal splitting and nonsingularity probes
    /// (default 42)
    #[arg(long)]
    seed: Option<u64>,
    /// Scale used by the witness metric construction (default 1)
    #[arg(long)]
    lambda: Option<f64>,
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Replace the document's task list (repeatable)
    #[arg(long = "task", value_name = "NAME")]
    tasks: Vec<String>,
    /// Print the canonical document with overrides applied, then exit
    #[arg(long)]
    emit_doc: bool,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Text,
    Json,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (mut doc, common) = match cli.command {
        Command::Analyze { file, common } => {
            let text = fs::read_to_string(&file).map_err(|e| CliError::Io {
                path: file.display().to_string(),
                message: e.to_string(),
            })?;
            (parse_document(&text)?, common)
        }
        Command::Builtin { name, params, common } => {
            (builtin_document(&name, &parse_params(&params)?)?, common)
        }
    };
    apply_overrides(&mut doc, &common);
    doc.validate()?;
    if common.emit_doc {
        print!("{}", emit(&doc));
        return Ok(0);
    }
    let report = run_report(&doc)?;
    match common.format {
        Format::Text => print!("{}", render_text(&report)),
        Format::Json => print!("{}", render_json(&report)),
    }
    Ok(exit_code(&report.reports))
}

/// Flags beat document fields; document fields beat defaults.
fn apply_overrides(doc: &mut AnalysisDocument, common: &Common) {
    if let Some(t) = common.tol {
        doc.tolerance = Some(t);
    }
    if let Some(s) = common.seed {
        doc.seed = Some(s);
    }
    if let Some(l) = common.lambda {
        doc.lambda = Some(l);
    }
    if !common.tasks.is_empty() {
        doc.tasks = common.tasks.clone();
    }
}

fn parse_params(params: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    params
        .iter()
        .map(|p| {
            let (key, value) = p
                .split_once('=')
                .ok_or_else(|| CliError::Schema(format!("parameter '{p}' is not of the form k=v")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| CliError::Schema(format!("parameter '{p}' has a non-numeric value")))?;
            Ok((key.to_string(), value))
        })
        .collect()
}
