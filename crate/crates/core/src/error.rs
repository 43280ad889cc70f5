use thiserror::Error;

use crate::index::Index;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series has zero constant term")]
    ZeroConstantTerm,
    #[error("bad constant term: {0}")]
    BadConstantTerm(&'static str),
    #[error("index not admissible: {0}")]
    NotAdmissible(Index),
    #[error("weight {0} is too small (need at least 2)")]
    WeightTooSmall(usize),
    #[error("sum diverges as a formal q-series: {0}")]
    DivergentSum(String),
    #[error("index {0} has no part >= 2")]
    NoPartAtLeastTwo(Index),
    #[error("q must lie strictly between 0 and 1, got {0}")]
    BadQ(f64),
    #[error("parameters outside the supported domain: {0}")]
    Domain(String),
    #[error("numeric envelope failed: {0}")]
    DivergenceDetected(String),
    #[error("invalid index syntax: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
