//! Riemann's greedy rearrangements: to a target, to ±∞, and oscillating.
//!
//! Each sign class is consumed in increasing index order; zero terms belong
//! to the nonnegative class. Within a class the relative order of terms is
//! therefore unchanged.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::series_core::{
    CompensatedSum, Emitter, PermError, Permutation, SeriesError, Sequential, TermSource,
};

use super::RearrangeError;

/// How far past the current position a sign-class scan may look.
pub const SCAN_LIMIT: usize = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn label(self) -> &'static str {
        match self {
            Sign::Plus => "nonnegative",
            Sign::Minus => "negative",
        }
    }
}

/// Next unused indices of each sign class and the running sum.
#[derive(Clone, Debug)]
pub struct GreedyState {
    source: TermSource,
    prefix: Vec<usize>,
    used: HashSet<usize>,
    next_pos: usize,
    next_neg: usize,
    sum: CompensatedSum,
    emitted: usize,
}

impl GreedyState {
    fn new(source: TermSource, prefix: Vec<usize>) -> Result<Self, RearrangeError> {
        if source.dim() != 1 {
            return Err(SeriesError::DimensionMismatch { expected: 1, found: source.dim() }.into());
        }
        let mut used = HashSet::new();
        for &v in &prefix {
            if !used.insert(v) {
                return Err(RearrangeError::PrefixNotInjective(v));
            }
        }
        Ok(GreedyState { source, prefix, used, next_pos: 0, next_neg: 0, sum: CompensatedSum::new(), emitted: 0 })
    }

    fn scan(&self, from: usize, sign: Sign) -> Result<usize, PermError> {
        let to = from.saturating_add(SCAN_LIMIT);
        for n in from..to {
            if self.used.contains(&n) {
                continue;
            }
            let x = self.source.scalar(n)?;
            let hit = match sign {
                Sign::Plus => x >= 0.0,
                Sign::Minus => x < 0.0,
            };
            if hit {
                return Ok(n);
            }
        }
        Err(PermError::StarvedSign { sign: sign.label(), from, to })
    }

    /// Emit the pending prefix entry if any.
    fn take_prefix(&mut self) -> Result<Option<usize>, PermError> {
        if self.emitted < self.prefix.len() {
            let v = self.prefix[self.emitted];
            self.sum.add(self.source.scalar(v)?);
            self.emitted += 1;
            return Ok(Some(v));
        }
        Ok(None)
    }

    fn take(&mut self, sign: Sign) -> Result<usize, PermError> {
        let from = match sign {
            Sign::Plus => self.next_pos,
            Sign::Minus => self.next_neg,
        };
        let n = self.scan(from, sign)?;
        match sign {
            Sign::Plus => self.next_pos = n + 1,
            Sign::Minus => self.next_neg = n + 1,
        }
        self.sum.add(self.source.scalar(n)?);
        self.emitted += 1;
        Ok(n)
    }

    pub fn sum(&self) -> f64 {
        self.sum.value()
    }

    pub fn emitted(&self) -> usize {
        self.emitted
    }
}

/// Greedy rule toward a finite target.
pub struct TargetEmitter {
    state: GreedyState,
    target: f64,
}

impl Emitter for TargetEmitter {
    fn next_value(&mut self) -> Result<usize, PermError> {
        if let Some(v) = self.state.take_prefix()? {
            return Ok(v);
        }
        let sign = if self.state.sum() <= self.target { Sign::Plus } else { Sign::Minus };
        self.state.take(sign)
    }
    fn describe(&self) -> String {
        format!("riemann:target={}", self.target)
    }
}

/// Rule for divergence to `+∞` (or, mirrored, `−∞`).
pub struct InfinityEmitter {
    state: GreedyState,
    sign: Sign,
    stage: usize,
}

impl InfinityEmitter {
    /// Number of opposite-sign terms appended so far.
    pub fn stage(&self) -> usize {
        self.stage
    }
}

impl Emitter for InfinityEmitter {
    fn next_value(&mut self) -> Result<usize, PermError> {
        if let Some(v) = self.state.take_prefix()? {
            return Ok(v);
        }
        let bar = (self.stage + 2) as f64;
        let s = self.state.sum();
        let (ahead, other) = match self.sign {
            Sign::Plus => (s > bar, Sign::Minus),
            Sign::Minus => (s < -bar, Sign::Plus),
        };
        if ahead {
            self.stage += 1;
            self.state.take(other)
        } else {
            self.state.take(self.sign)
        }
    }
    fn describe(&self) -> String {
        let s = match self.sign {
            Sign::Plus => "+",
            Sign::Minus => "-",
        };
        format!("to-infinity:sign={s}")
    }
}

/// Alternately above `hi` and below `lo`.
pub struct OscillateEmitter {
    state: GreedyState,
    lo: f64,
    hi: f64,
    rising: bool,
    swings: usize,
}

impl OscillateEmitter {
    /// Completed swings (each time the sum passes the far side of the band).
    pub fn swings(&self) -> usize {
        self.swings
    }
}

impl Emitter for OscillateEmitter {
    fn next_value(&mut self) -> Result<usize, PermError> {
        if let Some(v) = self.state.take_prefix()? {
            return Ok(v);
        }
        let s = self.state.sum();
        if self.rising && s > self.hi {
            self.rising = false;
            self.swings += 1;
        } else if !self.rising && s < self.lo {
            self.rising = true;
            self.swings += 1;
        }
        self.state.take(if self.rising { Sign::Plus } else { Sign::Minus })
    }
    fn describe(&self) -> String {
        format!("oscillate:lo={},hi={}", self.lo, self.hi)
    }
}

pub type RiemannPerm = Sequential<TargetEmitter>;

fn check_pcc(source: &TermSource) -> Result<(), RearrangeError> {
    if source.dim() != 1 {
        return Err(SeriesError::DimensionMismatch { expected: 1, found: source.dim() }.into());
    }
    Ok(())
}

/// Greedy permutation converging to `target`, emitting `prefix` first.
///
/// The source is not checked for the pcc proxy here (that needs a horizon);
/// a source that runs out of one sign class fails lazily with
/// [`PermError::StarvedSign`].
pub fn riemann_to_target(source: &TermSource, target: f64, prefix: &[usize]) -> Result<Arc<RiemannPerm>, RearrangeError> {
    check_pcc(source)?;
    if !target.is_finite() {
        return Err(RearrangeError::Precondition(format!("target must be finite, got {target}")));
    }
    let state = GreedyState::new(source.clone(), prefix.to_vec())?;
    Ok(Arc::new(Sequential::new(TargetEmitter { state, target })))
}

pub fn riemann_to_infinity(source: &TermSource, sign: Sign, prefix: &[usize]) -> Result<Arc<Sequential<InfinityEmitter>>, RearrangeError> {
    check_pcc(source)?;
    let state = GreedyState::new(source.clone(), prefix.to_vec())?;
    Ok(Arc::new(Sequential::new(InfinityEmitter { state, sign, stage: 0 })))
}

pub fn riemann_oscillate(source: &TermSource, lo: f64, hi: f64) -> Result<Arc<Sequential<OscillateEmitter>>, RearrangeError> {
    check_pcc(source)?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(RearrangeError::Precondition(format!("need lo < hi, got lo={lo}, hi={hi}")));
    }
    let state = GreedyState::new(source.clone(), Vec::new())?;
    Ok(Arc::new(Sequential::new(OscillateEmitter { state, lo, hi, rising: true, swings: 0 })))
}

/// Result of checking the band contract of a greedy rearrangement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub horizon: usize,
    /// Position of the first crossing of the target, if any.
    pub first_crossing: Option<usize>,
    pub crossings: usize,
    /// Positions after the first crossing where `|S_n − target|` exceeded the
    /// magnitude of the term that made the most recent crossing.
    pub violations: usize,
    /// Largest `|S_n − target|` after the first crossing.
    pub max_deviation: f64,
    pub final_sum: f64,
}

/// Walk every prefix sum and check `|S_n − target| ≤ |crossing term|`.
pub fn band_report(source: &TermSource, perm: &dyn Permutation, target: f64, horizon: usize) -> Result<BandReport, RearrangeError> {
    let order = perm.prefix(horizon)?;
    let mut sum = CompensatedSum::new();
    let mut above: Option<bool> = None;
    let mut band = f64::INFINITY;
    let mut rep = BandReport { horizon, first_crossing: None, crossings: 0, violations: 0, max_deviation: 0.0, final_sum: 0.0 };
    for (n, &k) in order.iter().enumerate() {
        let x = source.scalar(k)?;
        sum.add(x);
        let s = sum.value();
        let now = s > target;
        if let Some(prev) = above {
            if prev != now {
                rep.crossings += 1;
                rep.first_crossing.get_or_insert(n);
                band = x.abs();
            }
        }
        above = Some(now);
        if rep.first_crossing.is_some() {
            let dev = (s - target).abs();
            rep.max_deviation = rep.max_deviation.max(dev);
            if dev > band * (1.0 + 1e-12) + 1e-15 {
                rep.violations += 1;
            }
        }
    }
    rep.final_sum = sum.value();
    Ok(rep)
}

/// Whether the emitted indices of each sign class appear in increasing order.
pub fn sign_classes_ordered(source: &TermSource, order: &[usize]) -> Result<bool, SeriesError> {
    let (mut last_pos, mut last_neg): (Option<usize>, Option<usize>) = (None, None);
    for &k in order {
        let slot = if source.scalar(k)? >= 0.0 { &mut last_pos } else { &mut last_neg };
        if let Some(prev) = *slot {
            if k < prev {
                return Ok(false);
            }
        }
        *slot = Some(k);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::{check_invariants, partial_sums, Sampling};

    #[test]
    fn first_steps_toward_zero() {
        let p = riemann_to_target(&TermSource::AltHarmonic, 0.0, &[]).unwrap();
        assert_eq!(p.prefix(3).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn prefix_is_honoured() {
        let prefix: Vec<usize> = (0..6).collect();
        let p = riemann_to_target(&TermSource::AltHarmonic, 0.25, &prefix).unwrap();
        assert_eq!(p.prefix(6).unwrap(), prefix);
        assert!(check_invariants(p.as_ref(), 2000).ok());
        assert!(riemann_to_target(&TermSource::AltHarmonic, 0.25, &[1, 1]).is_err());
    }

    #[test]
    fn band_holds_toward_quarter() {
        let p = riemann_to_target(&TermSource::AltHarmonic, 0.25, &[]).unwrap();
        let r = band_report(&TermSource::AltHarmonic, p.as_ref(), 0.25, 20_000).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.first_crossing.is_some());
        assert!((r.final_sum - 0.25).abs() < 1e-3);
    }

    #[test]
    fn sign_classes_stay_ordered() {
        let p = riemann_to_target(&TermSource::AltHarmonic, 1.3, &[]).unwrap();
        assert!(sign_classes_ordered(&TermSource::AltHarmonic, &p.prefix(10_000).unwrap()).unwrap());
        assert!(!sign_classes_ordered(&TermSource::AltHarmonic, &[2, 0]).unwrap());
    }

    #[test]
    fn to_infinity_stays_above_stage() {
        let p = riemann_to_infinity(&TermSource::AltHarmonic, Sign::Plus, &[]).unwrap();
        let order = p.prefix(5_000).unwrap();
        let stage_at: Vec<(usize, f64)> = {
            let mut s = CompensatedSum::new();
            order.iter().map(|&k| {
                s.add(TermSource::AltHarmonic.scalar(k).unwrap());
                (k, s.value())
            })
            .collect()
        };
        let mut k = 0;
        for &(idx, sum) in &stage_at {
            if idx % 2 == 1 {
                k += 1;
            }
            if k >= 1 {
                assert!(sum >= k as f64, "stage {k} sum {sum}");
            }
        }
        assert!(p.with_emitter(|e| e.stage()) >= 3);
    }

    #[test]
    fn oscillation_swings() {
        let p = riemann_oscillate(&TermSource::AltHarmonic, 0.0, 1.0).unwrap();
        let t = partial_sums(&TermSource::AltHarmonic, p.as_ref(), 20_000, &Sampling::Every(1)).unwrap();
        assert!(t.run_max[0] > 1.0 && t.run_min[0] < 0.0);
        assert!(p.with_emitter(|e| e.swings()) >= 4);
        assert!(riemann_oscillate(&TermSource::AltHarmonic, 1.0, 1.0).is_err());
    }

    #[test]
    fn starved_class_fails_lazily() {
        let p = riemann_to_target(&TermSource::Harmonic, -1.0, &[]).unwrap();
        assert!(matches!(p.forward(0), Err(PermError::StarvedSign { sign: "negative", .. })));
    }
}
