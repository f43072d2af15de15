//! Infinite, coinfinite subsets of the naturals with rank/select access.

use std::fmt;
use std::sync::Arc;

/// An infinite, coinfinite `A ⊆ ℕ`.
///
/// `rank(n) = |A ∩ [0, n)|` and `nth(k)` is the k-th element (0-based). The
/// complement gets its own rank/select for free.
pub trait SetSource: Send + Sync {
    fn contains(&self, n: usize) -> bool;
    fn rank(&self, n: usize) -> usize;

    fn nth(&self, k: usize) -> usize {
        // least n with rank(n + 1) > k
        search_least(k, |n| self.rank(n + 1) > k)
    }

    fn complement_rank(&self, n: usize) -> usize {
        n - self.rank(n)
    }

    fn complement_nth(&self, k: usize) -> usize {
        search_least(k, |n| self.complement_rank(n + 1) > k)
    }

    fn describe(&self) -> String;
}

pub type SetRef = Arc<dyn SetSource>;

impl fmt::Debug for dyn SetSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// Least `n ≥ from` satisfying a monotone predicate (false…false true…).
pub(crate) fn search_least(from: usize, pred: impl Fn(usize) -> bool) -> usize {
    let mut lo = from;
    let mut step = 1usize;
    let mut hi = from;
    while !pred(hi) {
        lo = hi + 1;
        hi = hi.saturating_add(step);
        step = step.saturating_mul(2);
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// `{ offset + step·k : k ≥ 0 }`, `step ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    pub offset: usize,
    pub step: usize,
}

impl Progression {
    pub fn new(offset: usize, step: usize) -> Option<Self> {
        (step >= 2).then_some(Progression { offset, step })
    }
    pub fn evens() -> Self {
        Progression { offset: 0, step: 2 }
    }
    pub fn odds() -> Self {
        Progression { offset: 1, step: 2 }
    }
}

impl SetSource for Progression {
    fn contains(&self, n: usize) -> bool {
        n >= self.offset && (n - self.offset) % self.step == 0
    }
    fn rank(&self, n: usize) -> usize {
        if n <= self.offset {
            0
        } else {
            (n - self.offset).div_ceil(self.step)
        }
    }
    fn nth(&self, k: usize) -> usize {
        self.offset + self.step * k
    }
    fn describe(&self) -> String {
        match (self.offset, self.step) {
            (0, 2) => "evens".into(),
            (1, 2) => "odds".into(),
            (o, s) => format!("progression:offset={o},step={s}"),
        }
    }
}

/// A catalog set altered on finitely many points.
pub struct Modified {
    base: SetRef,
    /// sorted, distinct
    toggled: Vec<usize>,
}

impl Modified {
    pub fn new(base: SetRef, mut toggled: Vec<usize>) -> Self {
        toggled.sort_unstable();
        toggled.dedup();
        Modified { base, toggled }
    }
}

impl SetSource for Modified {
    fn contains(&self, n: usize) -> bool {
        self.base.contains(n) ^ self.toggled.binary_search(&n).is_ok()
    }
    fn rank(&self, n: usize) -> usize {
        let mut r = self.base.rank(n) as isize;
        for &t in self.toggled.iter().take_while(|&&t| t < n) {
            r += if self.base.contains(t) { -1 } else { 1 };
        }
        r as usize
    }
    fn describe(&self) -> String {
        format!("{} xor {:?}", self.base.describe(), self.toggled)
    }
}

/// Positions of the positive terms when, before the m-th negative term
/// (m = 1, 2, …), exactly `m + E(m)` positive terms have been placed, with
/// `E(m) = ⌈c·m^β⌉`.
///
/// The m-th negative term sits at position `q_m = 2m − 1 + E(m)`, so the set
/// is the complement of `{q_m}`; both are available in closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcessSchedule {
    pub beta: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("exponent beta must lie in (0, 1), got {0}")]
    Beta(f64),
    #[error("schedule infeasible at m = {m}: needs {needed} positive terms but {available} are already placed")]
    Infeasible { m: usize, needed: i64, available: i64 },
}

impl ExcessSchedule {
    /// Builds the schedule, checking feasibility for every `m ≤ check_to`.
    ///
    /// Feasible means the positive-term counts `m + E(m)` never decrease and
    /// never go negative.
    pub fn new(beta: f64, c: f64, check_to: usize) -> Result<Self, ScheduleError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(ScheduleError::Beta(beta));
        }
        let s = ExcessSchedule { beta, c };
        let mut prev = 0i64;
        for m in 1..=check_to.max(1) {
            let need = m as i64 + s.excess(m);
            if need < prev {
                return Err(ScheduleError::Infeasible { m, needed: need, available: prev });
            }
            prev = need;
        }
        Ok(s)
    }

    /// `E(m) = ⌈c·m^β⌉`
    pub fn excess(&self, m: usize) -> i64 {
        (self.c * (m as f64).powf(self.beta)).ceil() as i64
    }

    /// Position of the m-th negative term, m ≥ 1.
    pub fn negative_position(&self, m: usize) -> usize {
        (2 * m as i64 - 1 + self.excess(m)) as usize
    }

    /// Number of negative positions below `n`.
    fn negatives_below(&self, n: usize) -> usize {
        // q_m is strictly increasing in m
        search_least(1, |m| self.negative_position(m) >= n) - 1
    }
}

impl SetSource for ExcessSchedule {
    fn contains(&self, n: usize) -> bool {
        let m = self.negatives_below(n) + 1;
        self.negative_position(m) != n
    }
    fn rank(&self, n: usize) -> usize {
        n - self.negatives_below(n)
    }
    fn complement_nth(&self, k: usize) -> usize {
        self.negative_position(k + 1)
    }
    fn describe(&self) -> String {
        format!("excess:beta={},c={}", self.beta, self.c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_consistency(s: &dyn SetSource, n: usize) {
        let mut k = 0;
        let mut kc = 0;
        for x in 0..n {
            assert_eq!(s.rank(x), k, "rank({x}) for {}", s.describe());
            assert_eq!(s.complement_rank(x), kc);
            if s.contains(x) {
                assert_eq!(s.nth(k), x);
                k += 1;
            } else {
                assert_eq!(s.complement_nth(kc), x);
                kc += 1;
            }
        }
    }

    #[test]
    fn progressions() {
        check_consistency(&Progression::evens(), 200);
        check_consistency(&Progression::odds(), 200);
        check_consistency(&Progression::new(5, 3).unwrap(), 200);
        assert!(Progression::new(0, 1).is_none());
    }

    #[test]
    fn modified_sets() {
        let m = Modified::new(Arc::new(Progression::evens()), vec![3, 4, 10, 11]);
        assert!(m.contains(3) && !m.contains(4) && !m.contains(10) && m.contains(11));
        check_consistency(&m, 200);
    }

    #[test]
    fn zero_excess_is_evens() {
        let s = ExcessSchedule::new(0.5, 0.0, 1000).unwrap();
        for n in 0..500 {
            assert_eq!(s.contains(n), n % 2 == 0);
        }
        check_consistency(&s, 300);
    }

    #[test]
    fn excess_counts() {
        let s = ExcessSchedule::new(0.5, 1.0, 1000).unwrap();
        // before the 4th negative term: 4 + ⌈4^0.5⌉ = 6 positives
        let q4 = s.negative_position(4);
        assert_eq!(s.rank(q4), 6);
        check_consistency(&s, 2000);
        let t = ExcessSchedule::new(0.8, 1.0, 1000).unwrap();
        assert_eq!(t.rank(t.negative_position(100)), 140);
    }

    #[test]
    fn infeasible_and_bad_beta() {
        assert!(matches!(ExcessSchedule::new(1.0, 1.0, 10), Err(ScheduleError::Beta(_))));
        assert!(matches!(ExcessSchedule::new(0.5, -3.0, 100), Err(ScheduleError::Infeasible { .. })));
    }
}
