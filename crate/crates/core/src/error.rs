use thiserror::Error;

/// Errors raised by the constructions and their checkers.
///
/// Every variant has a stable name (see [`Error::name`]) which the CLI reports
/// alongside exit status 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input too large: {0}")]
    InputTooLarge(String),
    #[error("index {index} out of range for {len} members")]
    BadIndex { index: usize, len: usize },
    #[error("no candidate qualifies")]
    EmptyResult,
    #[error("subfamily does not have the property: {0}")]
    NotAProperty(String),
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("maximal subfamily contains the singleton member {index}")]
    DegenerateMaximalFamily { index: usize },
    #[error("predicate is not of finite character: {0}")]
    NotFiniteCharacter(String),
    #[error("no removal set makes the predicate hold")]
    NoMaximalSubset,
    #[error("bad seed set: {0}")]
    BadSeed(String),
    #[error("set is not maximal: {0}")]
    NotMaximal(String),
    #[error("dense oracle {oracle} misbehaved: {reason}")]
    BadDenseOracle { oracle: usize, reason: String },
    #[error("family has a finite maximal subfamily: {0}")]
    FiniteMaximalFamily(String),
    #[error("strategy {strategy} violates the convergence convention: {reason}")]
    StrategyConvention { strategy: usize, reason: String },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InputTooLarge(_) => "InputTooLarge",
            Error::BadIndex { .. } => "BadIndex",
            Error::EmptyResult => "EmptyResult",
            Error::NotAProperty(_) => "NotAProperty",
            Error::BadInput(_) => "BadInput",
            Error::DegenerateMaximalFamily { .. } => "DegenerateMaximalFamily",
            Error::NotFiniteCharacter(_) => "NotFiniteCharacter",
            Error::NoMaximalSubset => "NoMaximalSubset",
            Error::BadSeed(_) => "BadSeed",
            Error::NotMaximal(_) => "NotMaximal",
            Error::BadDenseOracle { .. } => "BadDenseOracle",
            Error::FiniteMaximalFamily(_) => "FiniteMaximalFamily",
            Error::StrategyConvention { .. } => "StrategyConvention",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
