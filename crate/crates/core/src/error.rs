use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid precision: {0}")]
    BadPrecision(String),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("division by zero")]
    DivideByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("residue {0} is divisible by p")]
    InvalidResidue(i64),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("bad level: {0}")]
    BadLevel(String),
    #[error("not divisible: {0}")]
    NotDivisible(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("bad conductor: {0}")]
    BadConductor(String),
    #[error("trivial character has no Gauss sum")]
    TrivialCharacter,
    #[error("pair is not decomposable: {0}")]
    NotDecomposable(String),
    #[error("result violates the integrality floor: {0}")]
    UnboundedResult(String),
    #[error("bad index: {0}")]
    BadIndex(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}
