use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point {index} coincides with another point of the configuration")]
    CoincidentPoint { index: usize },

    #[error("point {index} lies outside the bounding domain")]
    PointOutsideDomain { index: usize },

    #[error("erosion by {epsilon} empties the window (inradius {inradius})")]
    EmptyWindow { epsilon: f64, inradius: f64 },

    #[error("symmetric factorization broke down at lambda = {lambda} after {attempts} perturbations")]
    FactorizationBreakdown { lambda: f64, attempts: usize },

    #[error("replica {replica}: {source}")]
    Replica { replica: usize, source: Box<Error> },

    #[error("cell {cell} is not contained in the window: difference {corner:?} escapes it")]
    CellNotInWindow { cell: usize, corner: [f64; 3] },

    #[error("lattice resolution too coarse: {nodes} nodes across the support (need at least 4)")]
    ResolutionTooCoarse { nodes: usize },

    #[error("fit window is empty")]
    EmptyFitWindow,

    #[error("{what}: {count} exceeds the supported maximum {max}")]
    TooLarge { what: &'static str, count: usize, max: usize },

    #[error("functional is not increasing")]
    NonMonotoneFunctional,

    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
