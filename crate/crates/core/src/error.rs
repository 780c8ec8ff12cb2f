use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The document could not be parsed. `message` carries line/column context
    /// from the underlying parser.
    #[error("parse error in {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    /// A configuration value violates a model invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("no distance in [{min}, {max}] reaches p0 <= {target:e}")]
    Unreachable { target: f64, min: u32, max: u32 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("distance {distance} outside the fit's calibrated range [{min}, {max}]")]
    ModelRange { distance: u32, min: u32, max: u32 },

    #[error("unknown {kind} `{id}`")]
    UnknownEntity { kind: &'static str, id: String },

    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn in_scenario(self, name: &str) -> Self {
        Error::Scenario {
            name: name.to_string(),
            source: Box::new(self),
        }
    }

    /// True for errors that mean "this configuration cannot be realised"
    /// rather than "this input is malformed".
    pub fn is_infeasible(&self) -> bool {
        match self {
            Error::Infeasible(_) | Error::Unreachable { .. } => true,
            Error::Scenario { source, .. } => source.is_infeasible(),
            _ => false,
        }
    }
}
