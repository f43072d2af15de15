//! Counting order reversals of a permutation restricted to a set.

use serde::{Deserialize, Serialize};

use crate::rearrangers::SetSource;
use crate::series_core::{PermError, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JumbleVerdict {
    /// No reversal involves an element at or beyond the threshold.
    PreservedSoFar,
    Jumbled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumbleReport {
    pub horizon: usize,
    /// `|A ∩ [0, horizon)|`
    pub elements: usize,
    pub reversals: u64,
    /// Largest element of `A` taking part in a reversal.
    pub largest_involved: Option<usize>,
    /// `(N, reversals among elements below N)` at each checkpoint.
    pub checkpoints: Vec<(usize, u64)>,
    pub threshold: usize,
    pub verdict: JumbleVerdict,
}

/// Decades `10, 100, …` below `horizon`, then `horizon`.
pub fn decade_checkpoints(horizon: usize) -> Vec<usize> {
    let mut v = Vec::new();
    let mut c = 10;
    while c < horizon {
        v.push(c);
        c = c.saturating_mul(10);
    }
    v.push(horizon);
    v
}

struct Fenwick(Vec<u64>);

impl Fenwick {
    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.0.len() {
            self.0[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    /// count of entries ≤ i
    fn prefix(&self, i: usize) -> u64 {
        let mut i = i + 1;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Pairs `x < y` in `A ∩ [0, horizon)` with `p(x) > p(y)`.
///
/// The verdict uses the threshold `horizon / 10`.
pub fn jumble_test(p: &dyn Permutation, a: &dyn SetSource, horizon: usize) -> Result<JumbleReport, PermError> {
    jumble_test_at(p, a, horizon, &decade_checkpoints(horizon))
}

pub fn jumble_test_at(
    p: &dyn Permutation,
    a: &dyn SetSource,
    horizon: usize,
    checkpoints: &[usize],
) -> Result<JumbleReport, PermError> {
    let mut xs = Vec::new();
    let mut k = 0;
    loop {
        let x = a.nth(k);
        if x >= horizon {
            break;
        }
        xs.push(x);
        k += 1;
    }
    let vals: Vec<usize> = xs.iter().map(|&x| p.forward(x)).collect::<Result<_, _>>()?;
    let mut sorted = vals.clone();
    sorted.sort_unstable();
    let mut tree = Fenwick(vec![0; sorted.len() + 1]);
    let mut cps: Vec<usize> = checkpoints.iter().copied().filter(|&c| c <= horizon).collect();
    cps.sort_unstable();
    cps.dedup();
    let mut out = Vec::with_capacity(cps.len());
    let mut ci = 0;
    let mut total = 0u64;
    let mut largest = None;
    for (seen, (&x, &v)) in xs.iter().zip(&vals).enumerate() {
        while ci < cps.len() && cps[ci] <= x {
            out.push((cps[ci], total));
            ci += 1;
        }
        let r = sorted.partition_point(|&s| s < v);
        let above = seen as u64 - tree.prefix(r);
        if above > 0 {
            largest = Some(x);
            total += above;
        }
        tree.add(r);
    }
    for &c in &cps[ci..] {
        out.push((c, total));
    }
    let threshold = horizon / 10;
    let verdict = match largest {
        Some(x) if x >= threshold => JumbleVerdict::Jumbled,
        _ => JumbleVerdict::PreservedSoFar,
    };
    Ok(JumbleReport { horizon, elements: xs.len(), reversals: total, largest_involved: largest, checkpoints: out, threshold, verdict })
}
