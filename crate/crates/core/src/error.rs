use thiserror::Error;

/// Errors produced by the `twoion` library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("sideband order must be at least 1, got {0}")]
    InvalidOrder(u32),

    #[error("bus occupation m={m} must be below the sideband order k={k}")]
    BusNotBelowOrder { m: u32, k: u32 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("truncation n_max={n_max} is below the required m + 2k = {required}")]
    TruncationTooSmall { n_max: u32, required: u32 },

    #[error("eigendecomposition did not converge for the {dim}x{dim} matrix:\n{dump}")]
    EigenFailure { dim: usize, dump: String },

    #[error("{0}")]
    Unsupported(&'static str),

    #[error("relabeled bus index would fall below m={m} (found bus {bus})")]
    BusBelowOccupation { m: u32, bus: u32 },

    #[error("gate precondition failed: distance {distance:.3e} from diag(1,1,1,-1) exceeds {tolerance:.3e}")]
    NotControlledZ { distance: f64, tolerance: f64 },

    #[error("no root of {what} in [{lo}, {hi}]")]
    NoRoot { what: &'static str, lo: f64, hi: f64 },

    #[error("cannot parse grid `{0}`; expected min:max[:steps]")]
    GridSyntax(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
