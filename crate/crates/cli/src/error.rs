use std::process::ExitCode;

use serde_json::json;
use tangenta_core::{CurveError, DiagramError, ParseError, QuadratureError, TractionalError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Tractional(#[from] TractionalError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse(_) | CliError::Curve(CurveError::Parse(_)) => "parse",
            CliError::Output { .. } => "output",
            _ => "precondition",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Curve(CurveError::Parse(_)) => 2,
            _ => 3,
        }
    }

    /// Print the error as one JSON object on stderr.
    pub fn report(&self) -> ExitCode {
        let body = json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        eprintln!("{body}");
        ExitCode::from(self.exit_code())
    }
}
