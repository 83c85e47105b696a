use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rule vector must contain at least one rule")]
    EmptyRuleVector,
    #[error("configuration must contain at least one cell")]
    EmptyConfiguration,
    #[error("length mismatch: expected {expected} cells, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cell index {index} out of range for a {n}-cell automaton")]
    CellIndexOutOfRange { index: usize, n: usize },
    #[error("RMT {0} is out of range 0..=7")]
    RmtOutOfRange(u8),
    #[error("sibling/equivalence relations require two distinct RMTs (got {0} twice)")]
    SameRmt(u8),
    #[error("invalid rule {0:?}: expected a decimal in 0..=255")]
    ParseRule(String),
    #[error("invalid configuration {0:?}: expected a non-empty string of 0s and 1s")]
    ParseConfiguration(String),
    #[error("size {n} exceeds the configured cap of {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("level {level} out of range for a {n}-cell automaton")]
    LevelOutOfRange { level: usize, n: usize },
    #[error("malformed level: {0}")]
    MalformedLevel(String),
    #[error("degenerate pilot sample: mean is zero")]
    DegeneratePilot,
    #[error("invalid growth input: {0}")]
    InvalidGrowthInput(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;
