use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("malformed matrix literal: {0}")]
    Arity(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("expression is not a polynomial: {0}")]
    NotPolynomial(String),

    #[error("point is outside the domain of `{subterm}`: {reason}")]
    NotInDomain { subterm: String, reason: String },

    #[error("domain sampling exhausted after {attempts} rejections")]
    SamplingExhausted { attempts: usize },

    #[error("no sampled point lies in the common domain of both expressions")]
    NoCommonPoints,

    #[error("closure exceeded {limit} elements")]
    ClosureOverflow { limit: usize },

    #[error("degree bound too small: word `{word}` cannot be produced")]
    DegreeTooSmall { word: String },

    #[error("not certified up to degree {delta_max}")]
    NotCertified { delta_max: usize, margins: Vec<(usize, f64)> },

    #[error("pencil is not monic (constant coefficient differs from identity by {defect:e})")]
    NonMonicPencil { defect: f64 },

    #[error("not Hermitian: {0}")]
    NotHermitian(String),

    #[error("generator set is not Archimedean: {0}")]
    NotArchimedean(String),

    #[error("solver stalled after {iterations} iterations")]
    SolverStalled { iterations: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        Error::Syntax { offset, message: message.into() }
    }
}
