use thiserror::Error;

/// Error type shared across the crate.
#[derive(Error, Debug)]
pub enum QsError {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration (grid sizing, mesh alignment, schema violations).
    #[error("configuration error: {0}")]
    Config(String),

    /// Envelope mass leaked into the boundary band or past Nyquist.
    #[error("aliasing at t={t}: {detail}")]
    Aliasing { t: f64, detail: String },

    /// Two wavefunctions that must share a grid/frame do not.
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    /// A quadrature or iterative limit did not reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Horizon or step-size convergence probe failed its tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),

    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, QsError>;

impl QsError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        QsError::Io {
            path: path.into(),
            source,
        }
    }
}
