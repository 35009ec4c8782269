use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size exceeded: {what} is {got}, limit {limit}")]
    SizeExceeded {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("entry ({row}, {col}) = {value} outside [0, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("value matrix asymmetric at ({row}, {col}): gap {gap}")]
    Asymmetric { row: usize, col: usize, gap: f64 },
    #[error("unknown graph name `{0}`")]
    UnknownGraph(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("set is not independent: vertices {0} and {1} are adjacent")]
    NotIndependent(usize, usize),
    #[error("no independent set of size {0} found")]
    NoIndependentSet(usize),
    #[error("graphon is not regular (degree spread {0})")]
    NotRegular(f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_size(what: &'static str, got: usize, limit: usize) -> Result<()> {
    if got > limit {
        Err(Error::SizeExceeded { what, got, limit })
    } else {
        Ok(())
    }
}
