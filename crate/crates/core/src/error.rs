use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cascade overflow: {events} events at t={time} (cycle {cycle:?})")]
    CascadeOverflow {
        time: f64,
        events: usize,
        cycle: Option<u64>,
    },
    #[error("natural frequency is only defined for an unpumped element (v_ac = 0)")]
    DomainError,
    #[error("insufficient data: {found} events in window, need at least {needed}")]
    InsufficientData { found: usize, needed: usize },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty cycle window")]
    EmptyWindow,
    #[error("no analyzable cycles: every map is empty")]
    AllEmpty,
    #[error("degenerate mask: mask must contain both set and unset cells")]
    DegenerateMask,
    #[error("numerical blowup at t={time}: |x| reached {magnitude}")]
    NumericalBlowup { time: f64, magnitude: f64 },
    #[error("capacitance matrix is not positive definite at node {0}")]
    SingularMatrix(usize),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
