use thiserror::Error;

use crate::map::MapClass;

/// Errors raised by map evaluation, semigroup construction, classification
/// and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole hit: rational denominator vanishes at the evaluation point")]
    PoleHit,
    #[error("numeric overflow during evaluation")]
    Overflow,
    #[error("root iteration did not converge within {sweeps} sweeps")]
    RootFindFailure { sweeps: usize },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("composite mixes a rational leaf with a transcendental leaf")]
    MixedClass,
    #[error("invalid semigroup: {0}")]
    InvalidSemigroup(String),
    #[error("word index {index} out of range for {generators} generators")]
    WordIndex { index: usize, generators: usize },
    #[error("budget exceeded: {count} items requested, cap is {cap}")]
    BudgetExceeded { count: u128, cap: usize },
    #[error("operation requires a {expected:?} semigroup")]
    WrongClass { expected: MapClass },
    #[error("grid was not produced by the expected estimator: {0}")]
    WrongSource(String),
    #[error("backward walk from the start point dead-ended {restarts} times in a row")]
    DeadEnd { restarts: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("check `{name}` is registered but not implemented: {note}")]
    Unimplemented { name: String, note: String },
}

impl Error {
    /// True for failures the CLI reports as numeric (exit code 3).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::RootFindFailure { .. }
                | Error::BudgetExceeded { .. }
                | Error::Overflow
                | Error::PoleHit
                | Error::DeadEnd { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
