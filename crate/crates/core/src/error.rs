use thiserror::Error;

use crate::rootsys::Family;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid root system {family}_{rank}: {reason}")]
    InvalidRootSystem {
        family: Family,
        rank: usize,
        reason: String,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid painted diagram: {0}")]
    InvalidDiagram(String),
    #[error("vector is not in the centre t: white root {node} pairs to {value}")]
    NotInCentre { node: usize, value: String },
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("degenerate fibre: {0}")]
    DegenerateFibre(String),
    #[error("chamber violation: {0}")]
    Chamber(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}
