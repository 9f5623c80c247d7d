use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("marked site must be >= 1, got {0} (reflect (X, Z) -> (-X, -Z) for negative sites)")]
    InvalidSite(i64),
    #[error("query out of range: |X| = {x} and K = {k} must not exceed N = {n}")]
    QueryOutOfRange { n: u32, x: i64, k: u32 },
    #[error("path enumeration is capped at N = {max}, got N = {n}")]
    EnumerationTooLarge { n: u32, max: u32 },
    #[error("moment order must be 1 or 2, got {0}")]
    InvalidMomentOrder(u32),
    #[error("truncation order must be >= {min}, got {got}")]
    InvalidTruncation { got: usize, min: usize },
    #[error("series operation undefined: {0}")]
    SeriesDomain(&'static str),
    #[error("scaled site must be a positive finite real, got {0}")]
    InvalidScaledSite(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("trial count must be >= 1")]
    NoTrials,
    #[error("worker count must be >= 1")]
    NoWorkers,
    #[error("convergence report needs N >= 16, got {0}")]
    TooFewSteps(u32),
    #[error("histogram is for (N={hist_n}, Z={hist_z}) but exact table is for (N={table_n}, Z={table_z})")]
    ParameterMismatch {
        hist_n: u32,
        hist_z: i64,
        table_n: u32,
        table_z: i64,
    },
    #[error("histogram has no cell in common with the exact support")]
    EmptyOverlap,
    #[error("cannot parse dyadic probability from {0:?}")]
    ParseDyadic(String),
}

pub type Result<T> = std::result::Result<T, WalkError>;

pub(crate) fn check_site(z: i64) -> Result<()> {
    if z < 1 {
        Err(WalkError::InvalidSite(z))
    } else {
        Ok(())
    }
}
