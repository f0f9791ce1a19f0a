use thiserror::Error;

use crate::model::{Category, Side};
use crate::units::Dimension;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: Dimension, right: Dimension },

    #[error("unit scale 10^{0} outside the supported range 10^0..=10^12")]
    ScaleOutOfRange(i64),

    #[error("unknown unit symbol `{0}`")]
    UnknownUnit(String),

    #[error("malformed scale in unit token `{0}`")]
    MalformedScale(String),

    #[error("negative quantity {0} for a stock or flow")]
    NegativeQuantity(String),

    #[error("unit price must be positive, got {0}")]
    NonPositivePrice(String),

    #[error("decimal overflow while {0}")]
    Overflow(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("missing cost component `{0}`")]
    MissingComponent(String),

    #[error("closing stock would be negative ({0})")]
    NegativeClosingStock(String),

    #[error("category {category} is not legal on the {side} side")]
    IllegalCategory { side: Side, category: Category },

    #[error("duplicate item {side}/{category}/{item}")]
    DuplicateItem {
        side: Side,
        category: Category,
        item: String,
    },

    #[error("unassessed item `{0}` must carry a zero value")]
    UnassessedWithValue(String),

    #[error("region mismatch: opening `{opening}`, closing `{closing}`")]
    RegionMismatch { opening: String, closing: String },

    #[error("category {0} has no actor holding monitoring rights")]
    MissingMonitoring(Category),

    #[error("agency {0} appears under more than one name")]
    DuplicateAgency(String),

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("rows span more than one period or region: {0}")]
    MixedPeriod(String),

    #[error("unknown output format `{0}`")]
    UnknownFormat(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Errors that indicate a broken internal invariant rather than bad input.
    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
