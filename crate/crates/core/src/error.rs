use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NonSquare { rows: usize, cols: usize },

    #[error("permanent of dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("row repetitions total {rows} but column repetitions total {cols}")]
    MismatchedTotals { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("invalid probability {value}: {context}")]
    InvalidProbability { value: f64, context: String },

    #[error("bad mode index ({i}, {j}) for {n_modes} modes")]
    BadModeIndex { i: usize, j: usize, n_modes: usize },

    #[error("given rows are not orthonormal (deviation {deviation:.3e})")]
    RowsNotOrthonormal { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("detection pattern has zero probability")]
    ZeroProbabilityPattern,

    #[error("degenerate beam splitter angle theta = {theta}: sin(theta)cos(theta) vanishes")]
    DegenerateTheta { theta: f64 },

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("bad distribution shape: {0}")]
    BadDistributionShape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
