use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Poisson's ratio of 0.5 where a finite Lamé parameter is required.
    #[error("incompressible material (nu = 0.5): {0}")]
    IncompressibleSingularity(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("no contact: approach delta0 = {delta0} must be positive")]
    NoContact { delta0: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("solver did not converge: {message} (iterations = {iterations}, residual = {residual:e})")]
    Solver {
        message: String,
        iterations: usize,
        residual: f64,
    },

    #[error("expression error: {0}")]
    Expression(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Ingest { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
