//! Constructions that defeat given permutations: padding with zeros, escape
//! functions and preserved sets, interval flips, jumbling counts and mixing.

mod escape;
mod flip;
mod jumble;
mod mix;
mod pad;
mod partition;

pub use escape::{escape_function, preserved_set, EscapeFunction, IncFn, PreservedSet};
pub use flip::{dominates, flip_permutation, DominationReport, Flip};
pub use jumble::{decade_checkpoints, jumble_test, jumble_test_at, JumbleReport, JumbleVerdict};
pub use mix::{mix, mix_checkpoints, mix_experiment, verify_checkpoint, Checkpoint, MixEmitter, MixExperiment, Mixed, StageKind};
pub use pad::{matched_horizon, order_violations, pad_against, pad_by_iteration, PaddingSchedule, Provenance};
pub use partition::IntervalPartition;

use crate::series_core::{PermError, SeriesError, TrajectoryError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdversaryError {
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("function is not increasing: step {n} maps {value} to {next}")]
    NotIncreasing { n: usize, value: usize, next: usize },
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}
