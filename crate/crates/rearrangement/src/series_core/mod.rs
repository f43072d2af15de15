//! Term sources, lazy permutations, trajectories and their classification.

mod classify;
mod coding;
mod pcc;
mod perm;
mod source;
mod sum;
mod traj;

pub use classify::{classify, classify_coord, classify_values, Tolerances, Verdict};
pub use coding::{decode_pairs, decode_permutation, encode_permutation};
pub use pcc::{pcc_check, pcc_check_with, PccReport, PccThresholds};
pub use perm::{
    check_invariants, Compose, Emitter, Identity, InvariantReport, PartialMap, Perm, Permutation, Sequential,
    DEFAULT_SEARCH_LIMIT,
};
pub use source::{FileSource, Tail, TermRule, TermSource};
pub use sum::{compensated, CompensatedSum, VectorSum};
pub use traj::{partial_sums, Sampling, Trajectory, TrajectoryBuilder, TrajectoryError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("term {index} requested but the source has only {available} terms and no tail rule")]
    MissingTerm { index: usize, available: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
    #[error("term rule failed: {0}")]
    Rule(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PermError {
    #[error("value {value} produced at positions {first} and {second}")]
    NotInjective { value: usize, first: usize, second: usize },
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("generator exceeded its search limit of {limit} values")]
    SearchLimit { limit: usize },
    #[error("{sign} terms exhausted: none found in [{from}, {to})")]
    StarvedSign { sign: &'static str, from: usize, to: usize },
    #[error("generator failed: {0}")]
    Generator(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}
