use num_complex::Complex64;
use thiserror::Error;

use crate::disk::DiskPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {re}{im:+}i is not inside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("symbol is not a self-map of the disk: |phi| = {sup} at {witness}")]
    NotSelfMap { sup: f64, witness: DiskPoint },

    #[error("objective is not finite at {}{:+}i", point.re, point.im)]
    NonFinite { point: Complex64 },

    #[error("unsupported weight: {0}")]
    UnsupportedWeight(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Syntax { .. }
            | Error::Config(_)
            | Error::InvalidParameter(_)
            | Error::OutsideDisk { .. }
            | Error::Domain(_) => 2,
            Error::NotSelfMap { .. } => 3,
            Error::UnsupportedWeight(_) => 4,
            Error::NonFinite { .. } => 5,
            Error::Io(_) => 1,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(std::io::Error::other(e))
    }
}
