use thiserror::Error;

use crate::group::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} is singular at the origin")]
    Singular { what: &'static str },

    #[error("non-finite value from {what} at {point}")]
    NonFinite { what: &'static str, point: Point },

    #[error("no sample points inside the ball")]
    EmptyBall,

    #[error("sample region [{y0}, {y1}] x [{t0}, {t1}] does not cover the ball")]
    RegionTooSmall { y0: f64, y1: f64, t0: f64, t1: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
