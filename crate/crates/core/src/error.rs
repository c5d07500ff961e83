use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown catalog entry `{0}` (known: example1, example2, example3, geodesic)")]
    UnknownCatalogEntry(String),

    #[error("need at least {needed} uniformly spaced samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("integration step too large: Gram drift {drift:e} at s = {s}")]
    StepError { s: f64, drift: f64 },

    #[error("invalid initial frame: {0}")]
    InvalidInitialFrame(String),

    #[error("frame vectors are not linearly independent at s = {0}")]
    SingularFrameMatrix(f64),

    #[error("curve is not unit-speed spacelike at s = {s}: <g',g'> = {speed2}")]
    NotUnitSpeed { s: f64, speed2: f64 },

    #[error("point is not on AdS^3: <v,v> = {norm2}")]
    NotOnAdS3 { norm2: f64 },

    #[error("m(s) +/- n(s) = {value:e} is too close to zero at s = {s}")]
    DenominatorNearZero { s: f64, value: f64 },

    #[error("parameter {s} lies outside the curve interval [{a}, {b}]")]
    OutOfInterval { s: f64, a: f64, b: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of numerical evaluation (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::DenominatorNearZero { .. } | Error::StepError { .. }
        )
    }
}
