use thiserror::Error;

/// Errors produced while reading instances, building models and solving them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("invalid value at `{path}`: {message}")]
    Semantic { path: String, message: String },

    #[error("scenario probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("sigma fraction must be non-negative, got {0}")]
    NegativeSigma(f64),

    #[error("quantized factors disagree: {0}")]
    FactorMismatch(String),

    #[error("missing price series `{0}`")]
    MissingPrice(String),

    #[error("numerical breakdown in simplex: {0}")]
    NumericalBreakdown(String),

    #[error("model is infeasible (first violated family: {hint})")]
    Infeasible { hint: String },

    #[error("LP relaxation is unbounded")]
    Unbounded,

    #[error("brute-force enumeration supports at most {max} binaries, model has {found}")]
    TooManyBinaries { found: usize, max: usize },

    #[error("binary assignment has {found} entries, model has {expected} binaries")]
    AssignmentLength { found: usize, expected: usize },

    #[error("constraint tag `{0}` not present in solution")]
    MissingTag(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sensitivity case i = {multiplier}: {source}")]
    Sweep { multiplier: f64, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn semantic(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Semantic {
            path: path.into(),
            message: message.into(),
        }
    }
}
