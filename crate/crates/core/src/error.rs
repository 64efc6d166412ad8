use thiserror::Error;

/// Errors surfaced by the library.
///
/// Budget exhaustion inside the certified root finder is *not* an error;
/// it is reported through [`crate::bound::BracketStatus`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(u64),

    #[error("symbol {symbol} out of range for alphabet of size {k}")]
    SymbolOutOfRange { symbol: u64, k: u64 },

    #[error("alphabet mismatch: {0} vs {1}")]
    AlphabetMismatch(u64, u64),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("distribution row {row} sums to {sum}, expected 1")]
    DistributionNotNormalized { row: usize, sum: String },

    #[error("precision floor: {0}")]
    PrecisionFloor(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::ResourceGuard(msg.into())
    }
}
