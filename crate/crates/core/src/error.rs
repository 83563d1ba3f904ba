use std::fmt;

use crate::quiver::DimVec;

/// A naive-mode commutator whose bracket lies outside `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssumptionViolation {
    /// Transition `S^step -> S^(step+1)` during which the pair was met.
    pub step: usize,
    pub d1: DimVec,
    pub d2: DimVec,
    pub bracket: i64,
}

impl fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} -> {}: <{}, {}> = {}",
            self.step,
            self.step + 1,
            self.d1,
            self.d2,
            self.bracket
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assumption violation: {0}")]
    Assumption(AssumptionViolation),
    #[error("genealogy error: {0}")]
    Genealogy(String),
    #[error("degenerate line arrangement: {0}")]
    Degenerate(String),
    #[error("internal consistency error: {0}")]
    Consistency(String),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
