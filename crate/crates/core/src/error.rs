//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by group, ring, module-category and K-theory operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands belong to different specs: {0}")]
    SpecMismatch(String),

    #[error("invalid element for this spec: {0}")]
    InvalidElement(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("ring is not strongly systematic at degree {0}")]
    NotStronglySystematic(String),

    #[error("morphism is not idempotent")]
    NotIdempotent,

    #[error("matrix is not block lower triangular: nonzero block ({row_block}, {col_block})")]
    NotLowerTriangular { row_block: usize, col_block: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("functor is not additive: {0}")]
    NonAdditiveFunctor(String),

    #[error("search exhausted after {0} candidates")]
    SearchExhausted(usize),

    #[error("cannot classify slot: {0}")]
    UnclassifiableSlot(String),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("order is not invariant under the acting group: {0}")]
    OrderNotHInvariant(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("label kind not supported here: {0}")]
    LabelKind(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
