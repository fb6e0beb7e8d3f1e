use alloc::string::String;

/// Errors raised by the simulation and reconstruction core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("basis size {0} is not a power of 4 (k >= 1)")]
    NotPowerOfFour(usize),
    #[error("length {0} is not a power of 2")]
    NotPowerOfTwo(usize),
    #[error("length {0} cannot be reshaped into a square grid")]
    NotSquare(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("SLM side of {side_px} px is not divisible by a grid side of {grid_side}")]
    IncompatibleGrid { side_px: usize, grid_side: usize },
    #[error("element {index} out of range for a basis of size {n}")]
    ElementOutOfRange { index: usize, n: usize },
    #[error("operation requires a Hadamard basis")]
    NotHadamard,
    #[error("interferograms were recorded in `{recorded}` order but the basis is `{requested}`")]
    OrderingMismatch { recorded: String, requested: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse ordering `{0}` (expected natural|walsh|cake|random:<seed>)")]
    ParseOrdering(String),
    #[error("region of interest does not fit inside a {side}x{side} image")]
    RoiOutOfBounds { side: usize },
    #[error("mean uncorrected intensity inside the region of interest is zero")]
    DegenerateBaseline,
    #[error(
        "phase-shift sign convention check failed: configured correction gives {configured:.4e}, \
         the opposite sign gives {opposite:.4e}"
    )]
    SignConvention { configured: f64, opposite: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
