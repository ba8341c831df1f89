use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Boolean-algebra witness: {0}")]
    InvalidWitness(String),
    #[error("subset S must be non-empty")]
    EmptyS,
    #[error("level {level} is outside 0..={n}")]
    LevelOutOfRange { level: usize, n: usize },
    #[error("bad range: need 0 <= a <= b <= n, got a={a}, b={b}, n={n}")]
    BadRange { a: usize, b: usize, n: usize },
    #[error("ground sizes differ: {left} vs {right}")]
    GroundMismatch { left: usize, right: usize },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("precision {0} cannot be reached at the maximum working precision")]
    BadPrecision(String),
    #[error("threshold not met: {0}")]
    ThresholdNotMet(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("cannot partition ground set of size {n} into {r} blocks")]
    BadPartition { n: usize, r: usize },
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
