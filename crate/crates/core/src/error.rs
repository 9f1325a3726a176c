//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gcd of (0, 0) is undefined")]
    GcdOfZeros,

    #[error("{value} has no inverse modulo {modulus}")]
    NotInvertible { value: String, modulus: String },

    #[error("modulus must be at least 2, got {0}")]
    BadModulus(String),

    #[error("invalid Hirzebruch-Jung data: {0}")]
    InvalidChain(String),

    #[error("invalid quotient type: {0}")]
    InvalidQuotient(String),

    #[error("position {position} is outside the chain 1..={len}")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("singular linear system")]
    SingularSystem,

    #[error("invalid terminal point: {0}")]
    InvalidPoint(String),

    #[error("axial multiplicity is infinite (G has no constant term)")]
    InfiniteAxialMultiplicity,

    #[error("point is not of simple type (h = {0})")]
    NotSimpleType(String),

    #[error("special fiber is non-normal at the point (G_s = 0); no off-curve surface germ")]
    NonNormalSpecialFiber,

    #[error("non-terminal weighted blowup: discrepancy {0} is not positive")]
    NonTerminal(String),

    #[error("unknown index-one label {0:?}")]
    UnknownLabel(String),

    #[error("invalid curve configuration: {0}")]
    InvalidConfig(String),

    #[error("operation does not apply to case {0}")]
    WrongCase(String),

    #[error("configuration is not flipping: {0}")]
    NotFlipping(String),

    #[error("subcase (3b) configuration: excluded, no post-blowup degree")]
    ExcludedSubcase,

    #[error("no flipping curve of index 1 exists (r_max = 1)")]
    IndexOneFlip,

    #[error("flop requested off the K-trivial branch")]
    NotFlopBranch,

    #[error("a flop is pending; flip_step refused")]
    FlopPending,

    #[error("step budget of {0} exceeded before termination")]
    StepBudgetExceeded(usize),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    /// True for failures that indicate a broken mathematical invariant rather
    /// than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation(_) | Error::StepBudgetExceeded(_) | Error::SingularSystem
        )
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
