use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got:?}")]
    Dimension {
        expected: &'static str,
        got: (usize, usize),
    },
    #[error("matrix has a zero dimension")]
    EmptyMatrix,
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not positive semi-definite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("matrix is not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("matrix is singular to working precision (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("invalid scenario: {0}")]
    Scenario(&'static str),
    #[error("bit count {bits} is not a multiple of {bits_per_symbol}")]
    Framing { bits: usize, bits_per_symbol: usize },
    #[error("zero beamforming vector")]
    ZeroVector,
    #[error("invalid detector configuration: {0}")]
    Config(&'static str),
    #[error("search space of {size} vectors exceeds budget {budget}")]
    SearchTooLarge { size: u128, budget: u64 },
    #[error("empty candidate list")]
    EmptyList,
}
