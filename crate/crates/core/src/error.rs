use thiserror::Error;

/// Errors reported by the library.
///
/// Every operation is exact, so there are no numerical-accuracy errors here:
/// failures are malformed input, violated preconditions, or a truncation that
/// is too short to decide the question being asked.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("variable x{index} at position {pos} is out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize, pos: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("measure document: {0}")]
    Schema(String),

    #[error("atom {index} lies outside the radius bound")]
    AtomOutsideRadius { index: usize },

    #[error("atom {index} duplicates an earlier atom")]
    DuplicateAtom { index: usize },

    #[error("atom {index} has zero weight")]
    ZeroWeight { index: usize },

    #[error("atom {index} does not lie on the zero set of the polynomial")]
    AtomOffVariety { index: usize },

    #[error("the polynomial must be nonzero")]
    ZeroPolynomial,

    #[error("truncation order {given} is insufficient; at least {required} is required")]
    InsufficientTruncation { required: usize, given: usize },

    #[error("|zeta| must exceed the radius bound {radius}")]
    ZetaInsideRadius { radius: f64 },

    #[error("odd dimension {0}: only real zeta greater than the radius is supported")]
    ComplexZetaOddDimension(usize),

    #[error("theta must be a nonzero vector of length {0}")]
    InvalidDirection(usize),

    #[error("internal consistency violated: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
