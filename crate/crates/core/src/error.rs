use num_rational::BigRational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed group definition: {0}")]
    MalformedSpec(String),

    #[error("cannot parse group word {word:?}: {reason}")]
    BadWord { word: String, reason: String },

    #[error("cannot parse expression: {0}")]
    BadExpression(String),

    #[error("letter {letter} is outside the alphabet 0..{alphabet_size}")]
    BadLetter { letter: usize, alphabet_size: usize },

    #[error("closure budget of {max_states} states exceeded")]
    ClosureBudgetExceeded { max_states: usize },

    #[error("depth {depth} exceeds the configured maximum {max_depth}")]
    DepthExceeded { depth: usize, max_depth: usize },

    #[error("singular linear system: the minimized closure kept a non-trivial class fixing every letter")]
    SingularSystem,

    #[error("fixed-point measure of {0} is only bounded, an exact value is required")]
    InexactInput(String),

    #[error("measure is only known within [{lower}, {upper}]")]
    InexactMeasure {
        lower: Box<BigRational>,
        upper: Box<BigRational>,
    },

    #[error("both monomials must have gauge degree 0 (got {0})")]
    DegreeNonZero(i64),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Stable name of the error case.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedSpec(_) => "MalformedSpec",
            Error::BadWord { .. } => "BadWord",
            Error::BadExpression(_) => "BadExpression",
            Error::BadLetter { .. } => "BadLetter",
            Error::ClosureBudgetExceeded { .. } => "ClosureBudgetExceeded",
            Error::DepthExceeded { .. } => "DepthExceeded",
            Error::SingularSystem => "SingularSystem",
            Error::InexactInput(_) => "InexactInput",
            Error::InexactMeasure { .. } => "InexactMeasure",
            Error::DegreeNonZero(_) => "DegreeNonZero",
            Error::Inconsistent(_) => "Inconsistent",
        }
    }
}
