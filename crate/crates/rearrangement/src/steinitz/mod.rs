//! Polygonal confinement of finite vector batches and steering of vector
//! series toward a chosen sum.

mod confine;
mod kd;
mod kernel;
mod lp;
mod steer;

pub use confine::{confine_bruteforce, confine_greedy, ConfinementResult, VectorBatch, BRUTEFORCE_LIMIT};
pub use kernel::{kernel_diagnostic, kernel_diagnostic_with, KernelDiagnostic, KernelVerdict, DEFAULT_GROWTH_TOL};
pub use steer::{check_steering_preconditions, levy_steinitz_rearrange, SteerConfig, SteerReport, Steering};

use crate::series_core::{PermError, SeriesError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SteinitzError {
    #[error("batch of {n} vectors exceeds the exhaustive-search limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("empty batch")]
    Empty,
    #[error("row {row}: expected dimension {expected}, found {found}")]
    Dimension { expected: usize, found: usize, row: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("found a direction {direction:?} along which the series converges absolutely; the target may be unreachable")]
    Dependent { direction: Vec<f64> },
    #[error("prefix repeats value {0}")]
    PrefixNotInjective(usize),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Perm(#[from] PermError),
}
