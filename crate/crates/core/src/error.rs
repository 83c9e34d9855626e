use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pieces overlap: [{0}) and [{1})")]
    OverlappingPieces(String, String),
    #[error("negative coefficient {0}")]
    NegativeCoefficient(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
    #[error("not a step function")]
    NotStepFunction,
    #[error("not a non-increasing profile: {0}")]
    NotMonotone(String),
    #[error("function cannot be rearranged exactly: {0}")]
    NotRearrangeable(String),
    #[error("invalid space descriptor: {0}")]
    InvalidSpec(String),
    #[error("functional is not normable: {0}")]
    NotNormable(String),
    #[error("component order undecided: {0}")]
    Undecided(String),
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("candidate has zero or infinite norm")]
    DegenerateCandidate,
    #[error("family pair {0} is not HLP-dominated")]
    DominationFailed(usize),
    #[error("no constructive witness for {0}")]
    WitnessUnavailable(String),
    #[error("unsupported indices: {0}")]
    UnsupportedIndices(String),
    #[error("indices not applicable: {0}")]
    IndicesNotApplicable(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
