use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("level {requested} exceeds the configured ceiling {ceiling}")]
    LevelLimit { requested: u32, ceiling: u32 },

    #[error("operands live at different levels ({left} and {right})")]
    LevelMismatch { left: u32, right: u32 },

    #[error("division by zero")]
    DivisionByZero,

    /// The nearest lattice point is not unique: a cosine coordinate sits
    /// exactly halfway between two integers.
    #[error("ambiguous rounding: cosine coordinate {coordinate} equals {value}, a half-integer")]
    AmbiguousRounding { coordinate: usize, value: String },

    /// Precision ceiling reached without a certified answer.
    #[error("undecided at {bits} bits: {what}")]
    Undecided { what: String, bits: u32 },

    #[error("usage: {0}")]
    Usage(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
