use thiserror::Error;

/// Errors raised while building or evaluating set systems and measures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set must contain at least one element")]
    EmptyGround,
    #[error("ground set has {n} elements, the cap is {max}")]
    GroundTooLarge { n: usize, max: usize },
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("coat must contain empty")]
    CoatMissingEmpty,
    #[error("coat must contain omega")]
    CoatMissingOmega,
    #[error("duplicate coat member {0}")]
    DuplicateCoatMember(String),
    #[error("value outside [0,1]: {0}")]
    ValueOutOfRange(String),
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("no value assigned to refinement member {0}")]
    MissingValue(String),
    #[error("value assigned to {0}, which is not in the refinement")]
    NotInRefinement(String),
    #[error("conflicting values for {0}")]
    ConflictingValue(String),
    #[error("endpoint value violated: {0}")]
    EndpointValue(String),
    #[error("coat has {size} members, enumeration is capped at {max}")]
    CoatTooLarge { size: usize, max: usize },
    #[error("exhaustive quantification over 2^{n} subsets exceeds the budget (max n = {max})")]
    BudgetExceeded { n: usize, max: usize },
    #[error("shape outside the exponential refinement: {0}")]
    OutsideRefinement(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("pool cannot cover the target")]
    InfeasibleCover,
    #[error("too many elementary cells ({0}) for a single cover search")]
    TooManyCells(usize),
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate set definition `{0}`")]
    DuplicateSet(String),
    #[error("unknown set name `{0}`")]
    UnknownSet(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
