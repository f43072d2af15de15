//! Flip permutations and interval-partition domination.

use serde::{Deserialize, Serialize};

use super::IntervalPartition;
use crate::series_core::{PermError, Permutation};

/// Reverses each interval: `p(x) = iₙ + iₙ₊₁ − x − 1` for `x ∈ Iₙ`.
#[derive(Clone, Debug)]
pub struct Flip {
    partition: IntervalPartition,
}

pub fn flip_permutation(partition: IntervalPartition) -> Flip {
    Flip { partition }
}

impl Flip {
    pub fn partition(&self) -> &IntervalPartition {
        &self.partition
    }

    fn apply(&self, x: usize) -> usize {
        let (a, b) = self.partition.interval(self.partition.interval_of(x));
        a + b - x - 1
    }
}

impl Permutation for Flip {
    fn forward(&self, n: usize) -> Result<usize, PermError> {
        Ok(self.apply(n))
    }
    fn inverse(&self, m: usize) -> Result<usize, PermError> {
        Ok(self.apply(m))
    }
    fn cover_bound(&self, m: usize) -> Result<usize, PermError> {
        Ok(self.partition.interval(self.partition.interval_of(m)).1)
    }
    fn describe(&self) -> String {
        format!("flip({})", self.partition.describe())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub horizon: usize,
    /// Number of `J`-intervals lying inside `[0, horizon)`.
    pub checked: usize,
    /// Indices `k` for which no `Iₙ ⊆ J_k`.
    pub failures: Vec<usize>,
}

impl DominationReport {
    /// Largest failing index, if any; domination means failures stop.
    pub fn last_failure(&self) -> Option<usize> {
        self.failures.last().copied()
    }
}

/// For every `J_k ⊆ [0, horizon)`, does some `Iₙ` fit inside it?
pub fn dominates(j: &IntervalPartition, i: &IntervalPartition, horizon: usize) -> DominationReport {
    let mut failures = Vec::new();
    let mut k = 0;
    loop {
        let (a, b) = j.interval(k);
        if b > horizon {
            break;
        }
        // first I-interval starting at or after a
        let n = i.interval_of(a);
        let n = if i.cut(n) == a { n } else { n + 1 };
        if i.cut(n + 1) > b {
            failures.push(k);
        }
        k += 1;
    }
    DominationReport { horizon, checked: k, failures }
}
