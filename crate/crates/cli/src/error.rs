//! CLI-level errors and their process exit codes.
//!
//! Document problems (syntax, schema, shapes, unknown builtins) exit with 2.
//! Task-level failures never carry a CliError; they become error entries in
//! the report, and the exit code is 3 for precondition violations or 4 for
//! internal numerical failures (4 wins when both occur).

use gaussmap_core::Error as CoreError;

#[derive(thiserror::Error, Debug)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("unknown builtin '{0}'")]
    UnknownBuiltin(String),

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => exit_code_for_core(e),
            _ => 2,
        }
    }
}

pub fn exit_code_for_core(e: &CoreError) -> i32 {
    if e.is_precondition() {
        3
    } else {
        4
    }
}
