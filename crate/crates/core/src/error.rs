use alloc::string::String;

/// Everything that can go wrong while building or analyzing click statistics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("dimension mismatch: expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("not normalized: probabilities sum to {sum}")]
    NotNormalized { sum: f64 },
    #[error("unsupported condition a={condition}: zero probability")]
    UnsupportedCondition { condition: usize },
    #[error("no supported conditions")]
    NoSupportedConditions,
    #[error("degenerate marginal: mean {mean} with {bins} bins")]
    DegenerateMarginal { mean: f64, bins: usize },
    #[error("no variability in {0}")]
    NoVariability(&'static str),
    #[error("degenerate Q: Q + 1 = 0")]
    DegenerateQ,
    #[error("moment order {order} exceeds bin count {bins}")]
    OrderTooLarge { order: usize, bins: usize },
    #[error("eigen-solver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// True for failures of the numerical routines themselves, as opposed
    /// to bad input or statistics that are undefined on the data.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
