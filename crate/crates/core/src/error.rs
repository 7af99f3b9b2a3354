use thiserror::Error;

use crate::data::GroupPair;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by loaders, estimators, and statistical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty file")]
    EmptyFile,
    #[error("row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("bad header: expected {expected}, found `{found}`")]
    Header {
        expected: &'static str,
        found: String,
    },
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("point {index} is not binary (y={y}, c={c})")]
    NonBinaryPoint { index: usize, y: f64, c: f64 },
    #[error("operation requires a binary point set")]
    BinaryModeRequired,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("degenerate stratum: no points with (Y={y}, A={a})")]
    DegenerateStratum { y: u8, a: u8 },
    #[error("empty bucket: no pairs pooled into {0}")]
    EmptyBucket(GroupPair),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no pair budget up to {cap} reaches power {target}")]
    BudgetUnreachable { cap: u64, target: f64 },
    #[error("{errored} of {replicates} replicates failed (limit 1%); first failure: {first}")]
    DegenerateReplicates {
        errored: u64,
        replicates: u64,
        first: String,
    },
    #[error("empty weight cell: no points with (A={a}, Y={y})")]
    EmptyWeightCell { a: u8, y: u8 },
}
