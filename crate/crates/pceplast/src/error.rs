use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
///
/// Variants split into two families that the CLI maps onto exit codes:
/// configuration/input problems (exit 2) and numerical failures encountered
/// while running an otherwise valid study (exit 3). See
/// [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input value violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Study configuration is malformed or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// Mismatched dimensions between coupled objects (grid vs. input vs. basis).
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A quadrature level outside the shipped table range was requested.
    #[error("unsupported grid level {level}: supported levels are 1..={max}")]
    GridLevel { level: usize, max: usize },

    /// An iterative solve did not meet its tolerance within the iteration cap.
    #[error("{context}: no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        context: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A computation produced values outside the representable/valid range.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Failure at one step of a sequence (load step, grid point, sample),
    /// wrapping the cause.
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// I/O failure tagged with the file it concerns.
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// On-disk artifact (CSV, archive, sidecar) is malformed.
    #[error("malformed data in {path}: {message}")]
    Parse { path: String, message: String },
}

impl Error {
    /// True for failures that arise while evaluating a valid study —
    /// the CLI reports these with exit code 3 rather than 2.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::InvalidInput(_) | Error::Convergence { .. } | Error::Numerical(_) => true,
            Error::Step { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    /// Tags an error with the load-step index it occurred at.
    pub fn at_step(self, step: usize) -> Error {
        Error::Step {
            step,
            source: Box::new(self),
        }
    }

    /// Tags an `std::io::Error` with the path it concerns.
    pub fn file(path: &std::path::Path, source: std::io::Error) -> Error {
        Error::File {
            path: path.display().to_string(),
            source,
        }
    }
}
