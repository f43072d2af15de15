//! An almost-disjoint family of subsets of ℕ indexed by reals, and the
//! signed-block series `a^X` they induce.
//!
//! For a real `r` the set `A_r` holds the indices (under the enumeration in
//! [`RationalIndex`]) of a sequence of distinct rationals converging to `r`:
//! the nearest fractions `round(r·q)/q` for `q = 1, 2, …`, reduced, repeats
//! skipped. Two reals share only rationals close to both, so `A_r ∩ A_s` is
//! finite.

mod rationals;

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

pub use rationals::{Rational, RationalIndex};

use crate::series_core::{Sampling, SeriesError, TermRule, TermSource, Trajectory, TrajectoryBuilder};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdFamilyError {
    #[error("reals {i} and {j} coincide")]
    Duplicate { i: usize, j: usize },
    #[error("reals {i} and {j} are {distance:.3e} apart, below the resolution {bound:.3e} for this depth")]
    Separation { i: usize, j: usize, distance: f64, bound: f64 },
    #[error("real {0} is not finite or too large to approximate")]
    OutOfRange(f64),
    #[error("X ∩ Y has {} blocks below the horizon, more than {allowed}: {blocks:?}", blocks.len())]
    LargeIntersection { blocks: Vec<u64>, allowed: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Finite approximation of `A_r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdSet {
    pub real: f64,
    pub depth: usize,
    /// `(index, rational)` in generation order.
    pub members: Vec<(u64, Rational)>,
}

impl AdSet {
    pub fn elements(&self) -> BTreeSet<u64> {
        self.members.iter().map(|m| m.0).collect()
    }

    pub fn intersection(&self, other: &AdSet) -> BTreeSet<u64> {
        let a = self.elements();
        other.members.iter().map(|m| m.0).filter(|i| a.contains(i)).collect()
    }

    /// `member,num,den` rows sorted by member, with a header.
    pub fn to_csv(&self) -> String {
        let mut rows = self.members.clone();
        rows.sort_unstable_by_key(|m| m.0);
        let mut s = String::from("member,num,den\n");
        for (i, r) in rows {
            s.push_str(&format!("{i},{},{}\n", r.num, r.den));
        }
        s
    }

    pub fn blocks(&self) -> BlockSet {
        BlockSet::Explicit(self.elements())
    }
}

/// Reals closer than this cannot be told apart by `depth` approximants.
pub fn resolution(depth: usize) -> f64 {
    1.0 / (depth.max(1) as f64).sqrt()
}

fn approximants(r: f64, depth: usize, index: &mut RationalIndex) -> Vec<(u64, Rational)> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(depth);
    let mut q = 1u64;
    while out.len() < depth {
        let num = (r * q as f64).round() as i64;
        let x = Rational::new(num, q);
        if seen.insert(x) {
            out.push((index.index_of(x), x));
        }
        q += 1;
    }
    out
}

/// One [`AdSet`] per real, each with `depth` members.
pub fn rational_ad_family(reals: &[f64], depth: usize) -> Result<Vec<AdSet>, AdFamilyError> {
    let bound = resolution(depth);
    for (i, &r) in reals.iter().enumerate() {
        // numerators must fit comfortably: |r|·q for q up to ~2·depth
        if !r.is_finite() || r.abs() * (4 * depth.max(1)) as f64 > 1e15 {
            return Err(AdFamilyError::OutOfRange(r));
        }
        for (j, &s) in reals.iter().enumerate().skip(i + 1) {
            if r == s {
                return Err(AdFamilyError::Duplicate { i, j });
            }
            if (r - s).abs() < bound {
                return Err(AdFamilyError::Separation { i, j, distance: (r - s).abs(), bound });
            }
        }
    }
    let mut index = RationalIndex::new();
    Ok(reals.iter().map(|&r| AdSet { real: r, depth, members: approximants(r, depth, &mut index) }).collect())
}

/// Block `Iᵢ = [2^i + 1, 2^{i+1}]`; `n ∈ {0, 1}` lies in no block.
pub fn block_of(n: u64) -> Option<u64> {
    (n >= 2).then(|| u64::from((n - 1).ilog2()))
}

/// `(first, last)` of `Iᵢ`, inclusive.
pub fn block_bounds(i: u64) -> (u64, u64) {
    ((1 << i) + 1, 1 << (i + 1))
}

/// A set of block indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockSet {
    Explicit(BTreeSet<u64>),
    Odd,
    Even,
}

impl BlockSet {
    pub fn empty() -> Self {
        BlockSet::Explicit(BTreeSet::new())
    }

    pub fn contains(&self, i: u64) -> bool {
        match self {
            BlockSet::Explicit(s) => s.contains(&i),
            BlockSet::Odd => i % 2 == 1,
            BlockSet::Even => i % 2 == 0,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            BlockSet::Explicit(s) if s.len() <= 8 => format!("{s:?}"),
            BlockSet::Explicit(s) => format!("{{{} blocks}}", s.len()),
            BlockSet::Odd => "odd".into(),
            BlockSet::Even => "even".into(),
        }
    }
}

struct SignedBlocks(BlockSet);

impl TermRule for SignedBlocks {
    fn dim(&self) -> usize {
        1
    }
    fn term_into(&self, n: usize, out: &mut [f64]) -> Result<(), SeriesError> {
        out[0] = signed_block_term(&self.0, n as u64);
        Ok(())
    }
    fn describe(&self) -> String {
        format!("signed-blocks({})", self.0.describe())
    }
}

/// `a^X_n = −1/n` if `n ∈ Iᵢ` for some `i ∈ X`, else `1/n`; `a^X_0 = 0`.
pub fn signed_block_term(x: &BlockSet, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let m = 1.0 / n as f64;
    match block_of(n) {
        Some(i) if x.contains(i) => -m,
        _ => m,
    }
}

pub fn signed_block_series(x: BlockSet) -> TermSource {
    TermSource::rule(SignedBlocks(x))
}

/// `Σ_{n ∈ Iᵢ} 1/n`
pub fn block_harmonic(i: u64) -> f64 {
    let (a, b) = block_bounds(i);
    crate::series_core::compensated((a..=b).rev().map(|n| 1.0 / n as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub horizon: usize,
    /// Blocks in `X ∩ Y` meeting `[0, horizon)`.
    pub shared_blocks: Vec<u64>,
    /// Sum of all negative terms of `a^X + a^Y` below the horizon.
    pub negative_total: f64,
    /// Complete blocks in neither set (contribution `2·Σ 1/n`).
    pub positive_blocks: usize,
    /// Contribution of each complete block `i`, in order.
    pub block_contributions: Vec<f64>,
    pub final_sum: f64,
    pub bound: f64,
    /// First `N` with `Σ_{n<N} (a^X_n + a^Y_n) > bound`.
    pub exceeds_at: Option<usize>,
}

/// Prefix sums of `a^X + a^Y`. Refuses when more than `max_shared` blocks
/// below the horizon lie in both sets.
pub fn pair_divergence_check(
    x: &BlockSet,
    y: &BlockSet,
    horizon: usize,
    bound: f64,
    max_shared: usize,
    sampling: &Sampling,
) -> Result<(Trajectory, PairReport), AdFamilyError> {
    let top = block_of(horizon.max(2) as u64 - 1).unwrap_or(0);
    let shared: Vec<u64> = (0..=top).filter(|&i| x.contains(i) && y.contains(i)).collect();
    if shared.len() > max_shared {
        return Err(AdFamilyError::LargeIntersection { blocks: shared, allowed: max_shared });
    }
    let mut tb = TrajectoryBuilder::new(1, horizon, sampling);
    let mut neg = crate::series_core::CompensatedSum::new();
    let mut exceeds_at = None;
    let mut blocks = Vec::new();
    let mut block = crate::series_core::CompensatedSum::new();
    for n in 0..horizon as u64 {
        let t = signed_block_term(x, n) + signed_block_term(y, n);
        if t < 0.0 {
            neg.add(t);
        }
        tb.push(&[t]);
        if exceeds_at.is_none() && tb.current()[0] > bound {
            exceeds_at = Some(n as usize + 1);
        }
        if let Some(i) = block_of(n) {
            block.add(t);
            if n == block_bounds(i).1 {
                blocks.push(block.value());
                block = crate::series_core::CompensatedSum::new();
            }
        }
    }
    let traj = tb.finish();
    let positive_blocks = (0..blocks.len() as u64).filter(|&i| !x.contains(i) && !y.contains(i)).count();
    let report = PairReport {
        horizon,
        shared_blocks: shared,
        negative_total: neg.value(),
        positive_blocks,
        block_contributions: blocks,
        final_sum: traj.final_sum()[0],
        bound,
        exceeds_at,
    };
    Ok((traj, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OscillationVerdict {
    /// Some complete block sums to at most −1/2 and another to at least 1/2.
    Witnessed { negative_block: u64, positive_block: u64 },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub horizon: usize,
    /// `Σ_{n ∈ Iᵢ} a^X_n` for every block inside the horizon.
    pub block_sums: Vec<f64>,
    pub verdict: OscillationVerdict,
}

pub fn oscillation_witness(x: &BlockSet, horizon: usize) -> OscillationReport {
    let mut sums = Vec::new();
    let mut i = 0u64;
    while block_bounds(i).1 < horizon as u64 {
        let s = if x.contains(i) { -block_harmonic(i) } else { block_harmonic(i) };
        sums.push(s);
        i += 1;
    }
    let inside = (0..sums.len() as u64).filter(|&i| x.contains(i)).count();
    let outside = sums.len() - inside;
    let verdict = if inside < 2 || outside < 2 {
        OscillationVerdict::Undetermined {
            reason: format!("{inside} blocks in X and {outside} outside below the horizon; need two of each"),
        }
    } else {
        let neg = sums.iter().position(|&s| s <= -0.5);
        let pos = sums.iter().position(|&s| s >= 0.5);
        match (neg, pos) {
            (Some(a), Some(b)) => OscillationVerdict::Witnessed { negative_block: a as u64, positive_block: b as u64 },
            _ => OscillationVerdict::Undetermined { reason: "no block reached ±1/2".into() },
        }
    };
    OscillationReport { horizon, block_sums: sums, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocks_tile() {
        assert_eq!(block_of(0), None);
        assert_eq!(block_of(1), None);
        assert_eq!(block_of(2), Some(0));
        assert_eq!((block_of(3), block_of(4), block_of(5)), (Some(1), Some(1), Some(2)));
        for i in 0..20 {
            let (a, b) = block_bounds(i);
            assert_eq!(block_of(a), Some(i));
            assert_eq!(block_of(b), Some(i));
            assert_eq!(block_of(b + 1), Some(i + 1));
        }
    }

    #[test]
    fn block_one_is_negative() {
        let s = signed_block_series(BlockSet::Explicit([1].into()));
        assert_eq!(s.scalar(3).unwrap(), -1.0 / 3.0);
        assert_eq!(s.scalar(4).unwrap(), -0.25);
        assert_eq!(s.scalar(2).unwrap(), 0.5);
        assert_eq!(s.scalar(5).unwrap(), 0.2);
        assert_eq!(s.scalar(0).unwrap(), 0.0);
        let e = signed_block_series(BlockSet::empty());
        assert!((1..100).all(|n| e.scalar(n).unwrap() == 1.0 / n as f64));
    }

    #[test]
    fn family_errors() {
        let r = 2f64.sqrt();
        assert_eq!(rational_ad_family(&[r, r], 10), Err(AdFamilyError::Duplicate { i: 0, j: 1 }));
        assert!(matches!(rational_ad_family(&[r, r + 1e-4], 100), Err(AdFamilyError::Separation { i: 0, j: 1, .. })));
        assert!(matches!(rational_ad_family(&[f64::NAN], 10), Err(AdFamilyError::OutOfRange(_))));
    }

    #[test]
    fn members_distinct_and_converging() {
        let f = rational_ad_family(&[2f64.sqrt()], 500).unwrap();
        let a = &f[0];
        assert_eq!(a.elements().len(), 500);
        let errs: Vec<f64> = a.members.iter().map(|m| (m.1.value() - a.real).abs()).collect();
        // within 1/(2q) of the real
        for m in &a.members {
            assert!((m.1.value() - a.real).abs() <= 0.5 / m.1.den as f64 + 1e-15);
        }
        assert!(errs[400..].iter().all(|&e| e < 2e-3));
    }

    #[test]
    fn oscillation_cases() {
        let r = oscillation_witness(&BlockSet::Odd, 1 << 10);
        assert!(matches!(r.verdict, OscillationVerdict::Witnessed { negative_block: 1, positive_block: 0 }));
        let r = oscillation_witness(&BlockSet::empty(), 1 << 10);
        assert!(matches!(r.verdict, OscillationVerdict::Undetermined { .. }));
    }

    #[test]
    fn empty_pair_is_doubled_harmonic() {
        let (t, r) = pair_divergence_check(&BlockSet::empty(), &BlockSet::empty(), 65, 5.0, 0, &Sampling::Every(1)).unwrap();
        let h64: f64 = (1..=64).map(|n| 1.0 / n as f64).sum();
        assert!((r.final_sum - 2.0 * h64).abs() < 1e-12);
        assert!(r.exceeds_at.unwrap() < 64);
        assert_eq!(t.len(), 65);
        assert_eq!(r.negative_total, 0.0);
    }

    #[test]
    fn large_intersection_refused() {
        let e = pair_divergence_check(&BlockSet::Odd, &BlockSet::Odd, 1 << 10, 5.0, 3, &Sampling::default());
        assert!(matches!(e, Err(AdFamilyError::LargeIntersection { .. })));
    }
}
