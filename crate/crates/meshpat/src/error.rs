use thiserror::Error;

use crate::mesh::Square;

/// Errors produced by pattern construction, parsing and the proving machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("word is not a permutation of 1..={0}")]
    NotAPermutation(usize),

    #[error("square ({0}, {1}) out of range for a pattern of size {2}")]
    SquareOutOfRange(usize, usize, usize),

    #[error("square {0} is already shaded")]
    SquareShaded(Square),

    #[error("occurrence {0:?} is not valid for the host")]
    BadOccurrence(Vec<usize>),

    #[error("force point {0} out of range for a pattern of size {1}")]
    ForcePointOutOfRange(usize, usize),

    #[error("force repeats point {0}")]
    ForceRepeatedPoint(usize),

    #[error("patterns have different underlying classical patterns")]
    UnderlyingMismatch,

    #[error("occurrences have different lengths")]
    LengthMismatch,

    #[error("pattern too large: need {0} shading bits, at most 128 supported")]
    PatternTooLarge(usize),

    #[error("shading unit is not shadeable from point {0}")]
    NotShadeable(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("basis element {0} contains basis element {1}")]
    BasisNotMinimal(usize, usize),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
