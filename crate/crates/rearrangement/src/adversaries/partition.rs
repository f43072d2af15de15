//! Interval partitions `Iₙ = [iₙ, iₙ₊₁)` of ℕ with lazily computed cuts.

use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AdversaryError;
use crate::rearrangers::SetRef;

#[derive(Clone)]
enum Cuts {
    Uniform(usize),
    /// Listed cuts, then steps of `tail`.
    Explicit { cuts: Vec<usize>, tail: usize },
    /// `0` followed by every `stride`-th element of the set (from the first
    /// positive one).
    FromSet { set: SetRef, stride: usize },
    /// Widths drawn uniformly from `[1, max_width]`.
    Random { seed: u64, max_width: usize },
}

/// Cut points `0 = i₀ < i₁ < …`.
#[derive(Clone)]
pub struct IntervalPartition {
    cuts: Cuts,
    memo: Arc<RwLock<Memo>>,
}

struct Memo {
    cuts: Vec<usize>,
    rng: Option<ChaCha8Rng>,
}

impl std::fmt::Debug for IntervalPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.describe())
    }
}

impl IntervalPartition {
    fn with(cuts: Cuts, rng: Option<ChaCha8Rng>) -> Self {
        IntervalPartition { cuts, memo: Arc::new(RwLock::new(Memo { cuts: vec![0], rng })) }
    }

    pub fn uniform(width: usize) -> Result<Self, AdversaryError> {
        if width == 0 {
            return Err(AdversaryError::Partition("width must be positive".into()));
        }
        Ok(Self::with(Cuts::Uniform(width), None))
    }

    pub fn explicit(cuts: Vec<usize>, tail: usize) -> Result<Self, AdversaryError> {
        if cuts.first() != Some(&0) {
            return Err(AdversaryError::Partition("cuts must start at 0".into()));
        }
        if let Some(w) = cuts.windows(2).find(|w| w[0] >= w[1]) {
            return Err(AdversaryError::Partition(format!("cuts not increasing at {} → {}", w[0], w[1])));
        }
        if tail == 0 {
            return Err(AdversaryError::Partition("tail width must be positive".into()));
        }
        Ok(Self::with(Cuts::Explicit { cuts, tail }, None))
    }

    /// Cuts at `0` and `a_{s}, a_{2s}, …`, e.g. stride 3 over `{0, 2, 6, 14, …}`
    /// gives `[a_{3k}, a_{3k+3})`.
    pub fn from_set(set: SetRef, stride: usize) -> Result<Self, AdversaryError> {
        if stride == 0 {
            return Err(AdversaryError::Partition("stride must be positive".into()));
        }
        Ok(Self::with(Cuts::FromSet { set, stride }, None))
    }

    pub fn random(seed: u64, max_width: usize) -> Result<Self, AdversaryError> {
        if max_width == 0 {
            return Err(AdversaryError::Partition("max width must be positive".into()));
        }
        Ok(Self::with(Cuts::Random { seed, max_width }, Some(ChaCha8Rng::seed_from_u64(seed))))
    }

    fn next_cut(&self, memo: &mut Memo) -> usize {
        let n = memo.cuts.len();
        let last = memo.cuts[n - 1];
        match &self.cuts {
            Cuts::Uniform(w) => last + w,
            Cuts::Explicit { cuts, tail } => cuts.get(n).copied().unwrap_or(last + tail),
            Cuts::FromSet { set, stride } => {
                // the first set element counts as index 0 if it is 0
                let shift = usize::from(!set.contains(0));
                let c = set.nth(n * stride - shift);
                c.max(last + 1)
            }
            Cuts::Random { max_width, .. } => {
                let rng = memo.rng.as_mut().expect("random partition keeps its generator");
                last + rng.random_range(1..=*max_width)
            }
        }
    }

    /// `iₙ`
    pub fn cut(&self, n: usize) -> usize {
        if let Some(&c) = self.memo.read().unwrap().cuts.get(n) {
            return c;
        }
        let mut m = self.memo.write().unwrap();
        while m.cuts.len() <= n {
            let c = self.next_cut(&mut m);
            m.cuts.push(c);
        }
        m.cuts[n]
    }

    /// `[iₙ, iₙ₊₁)`
    pub fn interval(&self, n: usize) -> (usize, usize) {
        (self.cut(n), self.cut(n + 1))
    }

    /// The `n` with `x ∈ Iₙ`.
    pub fn interval_of(&self, x: usize) -> usize {
        {
            let m = self.memo.read().unwrap();
            if *m.cuts.last().unwrap() > x {
                return m.cuts.partition_point(|&c| c <= x) - 1;
            }
        }
        let mut m = self.memo.write().unwrap();
        while *m.cuts.last().unwrap() <= x {
            let c = self.next_cut(&mut m);
            m.cuts.push(c);
        }
        m.cuts.partition_point(|&c| c <= x) - 1
    }

    pub fn describe(&self) -> String {
        match &self.cuts {
            Cuts::Uniform(w) => format!("uniform:width={w}"),
            Cuts::Explicit { cuts, tail } => format!("explicit:cuts={cuts:?},tail={tail}"),
            Cuts::FromSet { set, stride } => format!("from-set:{},stride={stride}", set.describe()),
            Cuts::Random { seed, max_width } => format!("random:seed={seed},max={max_width}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rearrangers::Progression;

    #[test]
    fn uniform_and_lookup() {
        let p = IntervalPartition::uniform(3).unwrap();
        assert_eq!(p.interval(4), (12, 15));
        assert_eq!(p.interval_of(14), 4);
        assert_eq!(p.interval_of(0), 0);
    }

    #[test]
    fn explicit_with_tail() {
        let p = IntervalPartition::explicit(vec![0, 1, 5], 2).unwrap();
        assert_eq!((p.cut(2), p.cut(3), p.cut(4)), (5, 7, 9));
        assert!(IntervalPartition::explicit(vec![0, 3, 3], 1).is_err());
        assert!(IntervalPartition::explicit(vec![1, 3], 1).is_err());
    }

    #[test]
    fn random_is_reproducible_and_increasing() {
        let a = IntervalPartition::random(9, 5).unwrap();
        let b = IntervalPartition::random(9, 5).unwrap();
        // query in different orders
        assert_eq!(b.interval_of(500), a.interval_of(500));
        for n in 0..100 {
            assert_eq!(a.cut(n), b.cut(n));
            assert!(a.cut(n + 1) > a.cut(n) && a.cut(n + 1) - a.cut(n) <= 5);
        }
    }

    #[test]
    fn from_set_strides() {
        let p = IntervalPartition::from_set(Arc::new(Progression::evens()), 2).unwrap();
        assert_eq!((p.cut(0), p.cut(1), p.cut(2)), (0, 4, 8));
        let q = IntervalPartition::from_set(Arc::new(Progression::odds()), 1).unwrap();
        assert_eq!((q.cut(0), q.cut(1), q.cut(2)), (0, 1, 3));
    }
}
