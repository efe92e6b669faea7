use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The variants split into two families: input/usage problems (syntax,
/// unknown identifiers, malformed specifications) and numeric problems
/// (domain violations, non-convergence, overflow). [`Error::is_usage`]
/// tells them apart; the CLI maps them onto different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("no convergence: {message} (last samples {last:?})")]
    NonConvergence { message: String, last: [f64; 2] },

    #[error("metric is not positive definite at {point:?}: leading minor {minor} = {value}")]
    NotPositiveDefinite {
        point: Vec<f64>,
        minor: usize,
        value: f64,
    },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("trajectory left the domain after {} of {steps} steps", .partial.len().saturating_sub(1))]
    DomainExit {
        partial: Vec<Vec<f64>>,
        steps: usize,
    },

    #[error("at grid point {point:?}: {source}")]
    AtPoint {
        point: Vec<f64>,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid specification: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by malformed input rather than by numerics.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Syntax { .. } | Error::UnknownIdentifier { .. } | Error::Spec(_) => true,
            Error::AtPoint { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
