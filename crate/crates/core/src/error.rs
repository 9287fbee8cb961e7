use thiserror::Error;

/// Errors reported by statistic construction and the test procedures.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("distance table is not square: {rows} rows but row {row} has {cols} columns")]
    NonSquare { rows: usize, row: usize, cols: usize },

    #[error("negative distance {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("asymmetry beyond tolerance at ({row}, {col}): {delta} > {tolerance}")]
    AsymmetricBeyondTolerance {
        row: usize,
        col: usize,
        delta: f64,
        tolerance: f64,
    },

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("nonzero diagonal {value} at ({row}, {row})")]
    NonzeroDiagonal { row: usize, value: f64 },

    #[error("row {row} has zero norm and cannot be projected onto the unit sphere")]
    ZeroNormRow { row: usize },

    #[error("row {row} has norm {norm}, too far from the unit sphere to renormalize")]
    NotOnUnitSphere { row: usize, norm: f64 },

    #[error("group {group} is empty")]
    EmptyGroup { group: usize },

    #[error("group labels are invalid: {reason}")]
    InvalidLabels { reason: String },

    #[error("input sequence must be sorted ascending (violated at position {position})")]
    UnsortedInput { position: usize },

    #[error("shuffled labels do not match the group sizes (group {group}: {got} labels, expected {expected})")]
    LabelCountMismatch {
        group: usize,
        got: usize,
        expected: usize,
    },

    #[error("dimension mismatch: expected {expected} observations, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mutual independence test needs at least 2 variables, got {got}")]
    TooFewVariables { got: usize },

    #[error("sequences have different lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot compute a p-value from an empty null sample")]
    EmptyNullSample,

    #[error("permutation plan mode does not fit this test: {reason}")]
    PlanMismatch { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
