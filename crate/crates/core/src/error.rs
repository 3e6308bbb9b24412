use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grid mismatch: {left} points vs {right} points")]
    GridMismatch { left: usize, right: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NonHermitian(f64),

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    GuardExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid cut {cut} for a chain of {sites} sites")]
    InvalidCut { cut: usize, sites: usize },

    #[error("bond dimension {bond} would exceed the hard cap {cap}")]
    BondOverflow { bond: usize, cap: usize },

    #[error("unsupported case: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn require_power_of_two(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok(n.trailing_zeros())
}
