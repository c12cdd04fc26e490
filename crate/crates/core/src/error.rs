use alloc::string::String;

/// Errors raised by tensor construction, the spin map and the certification pipeline.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("tensor order must be at least {min}, got {found}")]
    OrderTooSmall { min: usize, found: usize },
    #[error("tensor order {0} exceeds the supported maximum of 20")]
    OrderTooLarge(usize),
    #[error("tensor dimension must be at least 2, got {0}")]
    DimTooSmall(usize),
    #[error("multi-index has length {found}, expected {expected}")]
    IndexLength { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate entry for multi-index {0:?}")]
    DuplicateIndex(alloc::vec::Vec<usize>),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("vector length {found} does not match tensor dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: order {lhs_order}/dim {lhs_dim} vs order {rhs_order}/dim {rhs_dim}")]
    ShapeMismatch {
        lhs_order: usize,
        lhs_dim: usize,
        rhs_order: usize,
        rhs_dim: usize,
    },
    #[error("matrix is not orthogonal (max deviation {0:e})")]
    NotOrthogonal(f64),
    #[error("not a regular vector: {0}")]
    NotRegularVector(String),
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("trace has imaginary part {0:e}")]
    ComplexTrace(f64),
    #[error("spin count {0} outside supported range 1..=10")]
    SpinCountOutOfRange(usize),
    #[error("Dicke index {k} out of range for N = {n}")]
    DickeIndex { n: usize, k: usize },
    #[error("Pauli index {0} out of range 0..=3")]
    PauliIndex(usize),
    #[error("negative mixture weight {0}")]
    NegativeWeight(f64),
    #[error("empty mixture")]
    EmptyMixture,
    #[error("operation requires {expected} order, got {order}")]
    Parity { expected: &'static str, order: usize },
    #[error("tensor is not regular symmetric (defect {0:e})")]
    NotRegularSymmetric(f64),
    #[error("decomposition has {terms} terms, above the Caratheodory cap {cap}")]
    CapExceeded { terms: usize, cap: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
