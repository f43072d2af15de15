//! Constructive rearrangements of real series.

mod riemann;
mod sets;
mod shuffle;

pub use riemann::{
    band_report, riemann_oscillate, riemann_to_infinity, riemann_to_target, sign_classes_ordered, BandReport,
    GreedyState, InfinityEmitter, OscillateEmitter, RiemannPerm, Sign, TargetEmitter, SCAN_LIMIT,
};
pub use sets::{ExcessSchedule, Modified, Progression, ScheduleError, SetRef, SetSource};
pub use shuffle::{shuffle_onto_evens, two_exponent_experiment, Shuffle, TwoExponentReport, TwoExponentResult};

use crate::series_core::{PermError, SeriesError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RearrangeError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("prefix repeats value {0}")]
    PrefixNotInjective(usize),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `excess_schedule_set(β, c)`, checked for feasibility up to `check_to` negative terms.
pub fn excess_schedule_set(beta: f64, c: f64, check_to: usize) -> Result<ExcessSchedule, ScheduleError> {
    ExcessSchedule::new(beta, c, check_to)
}
