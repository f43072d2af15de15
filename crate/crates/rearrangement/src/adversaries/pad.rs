//! Padding a series with zeros so that given permutations cannot reorder
//! its nonzero terms (past a finite prefix).

use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use super::{AdversaryError, IncFn};
use crate::series_core::{Perm, PermError, SeriesError, TermRule, TermSource};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    /// Built against a finite family of permutations.
    Against { perms: usize },
    /// Positions `g^k(0)`.
    Iterate { g: String },
}

enum Rule {
    Against(Vec<Perm>),
    Iterate(IncFn),
}

/// Strictly increasing positions `l(0) < l(1) < …` of the nonzero terms.
pub struct PaddingSchedule {
    rule: Rule,
    memo: RwLock<Vec<usize>>,
}

impl PaddingSchedule {
    fn new(rule: Rule) -> Self {
        PaddingSchedule { rule, memo: RwLock::new(vec![0]) }
    }

    pub fn provenance(&self) -> Provenance {
        match &self.rule {
            Rule::Against(p) => Provenance::Against { perms: p.len() },
            Rule::Iterate(g) => Provenance::Iterate { g: g.describe() },
        }
    }

    /// `l(k+1)` from `l(0..=k)`.
    fn next(&self, ls: &[usize]) -> Result<usize, PermError> {
        let k = ls.len() - 1;
        let last = ls[k];
        match &self.rule {
            Rule::Iterate(g) => {
                let v = g.eval(last);
                if v <= last {
                    return Err(PermError::Generator(format!("{} is not increasing at {last}", g.describe())));
                }
                Ok(v)
            }
            Rule::Against(perms) => {
                // least v > l(k) avoiding p_m[[0, p_m⁻¹(l(k))]] for all m ≤ k
                let active = &perms[..perms.len().min(k + 1)];
                let floors: Vec<usize> = active.iter().map(|p| p.inverse(last)).collect::<Result<_, _>>()?;
                let mut v = last + 1;
                'search: loop {
                    for (p, &f) in active.iter().zip(&floors) {
                        if p.inverse(v)? <= f {
                            v += 1;
                            continue 'search;
                        }
                    }
                    return Ok(v);
                }
            }
        }
    }

    fn extend(&self, done: impl Fn(&[usize]) -> bool) -> Result<(), PermError> {
        if done(&self.memo.read().unwrap()) {
            return Ok(());
        }
        let mut m = self.memo.write().unwrap();
        while !done(&m) {
            let v = self.next(&m)?;
            m.push(v);
        }
        Ok(())
    }

    /// `l(k)`
    pub fn l(&self, k: usize) -> Result<usize, PermError> {
        self.extend(|m| m.len() > k)?;
        Ok(self.memo.read().unwrap()[k])
    }

    /// `l(0..count)`
    pub fn positions(&self, count: usize) -> Result<Vec<usize>, PermError> {
        self.extend(|m| m.len() >= count)?;
        Ok(self.memo.read().unwrap()[..count].to_vec())
    }

    /// The `k` with `l(k) = n`, if any.
    pub fn index_of(&self, n: usize) -> Result<Option<usize>, PermError> {
        self.extend(|m| *m.last().unwrap() >= n)?;
        Ok(self.memo.read().unwrap().binary_search(&n).ok())
    }

    /// Rows `k,l_k` for `k < count`, with a header.
    pub fn to_csv(&self, count: usize) -> Result<String, PermError> {
        let mut s = String::from("k,l_k\n");
        for (k, l) in self.positions(count)?.into_iter().enumerate() {
            s.push_str(&format!("{k},{l}\n"));
        }
        Ok(s)
    }
}

struct Padded {
    schedule: Arc<PaddingSchedule>,
    base: TermSource,
}

impl TermRule for Padded {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn term_into(&self, n: usize, out: &mut [f64]) -> Result<(), SeriesError> {
        match self.schedule.index_of(n).map_err(|e| SeriesError::Rule(e.to_string()))? {
            Some(k) => self.base.term_into(k, out),
            None => {
                out.fill(0.0);
                Ok(())
            }
        }
    }
    fn describe(&self) -> String {
        format!("padded({}, {:?})", self.base.describe(), self.schedule.provenance())
    }
}

fn padded(schedule: PaddingSchedule, base: &TermSource) -> (Arc<PaddingSchedule>, TermSource) {
    let schedule = Arc::new(schedule);
    let src = TermSource::rule(Padded { schedule: schedule.clone(), base: base.clone() });
    (schedule, src)
}

/// Pads `base` so that, for every `m` and `k ≥ m`,
/// `p_m⁻¹(l(k)) < p_m⁻¹(l(k+1))`.
pub fn pad_against(perms: Vec<Perm>, base: &TermSource) -> (Arc<PaddingSchedule>, TermSource) {
    padded(PaddingSchedule::new(Rule::Against(perms)), base)
}

/// Places `b_k` at `g^k(0)`.
pub fn pad_by_iteration(g: IncFn, base: &TermSource) -> Result<(Arc<PaddingSchedule>, TermSource), AdversaryError> {
    let orbit = g.orbit(64);
    if let Some(w) = orbit.windows(2).find(|w| w[1] <= w[0]) {
        return Err(AdversaryError::NotIncreasing { n: w[0], value: w[0], next: w[1] });
    }
    if orbit.len() < 2 {
        return Err(AdversaryError::NotIncreasing { n: 0, value: 0, next: g.eval(0) });
    }
    Ok(padded(PaddingSchedule::new(Rule::Iterate(g)), base))
}

/// Pairs `(m, k)`, `m ≤ k < upto`, where `p_m⁻¹(l(k)) < p_m⁻¹(l(k+1))` fails.
pub fn order_violations(perms: &[Perm], schedule: &PaddingSchedule, upto: usize) -> Result<Vec<(usize, usize)>, PermError> {
    let ls = schedule.positions(upto + 1)?;
    let mut bad = Vec::new();
    for (m, p) in perms.iter().enumerate() {
        let mut prev = None;
        for (k, &l) in ls.iter().enumerate().skip(m) {
            let cur = p.inverse(l)?;
            if let Some(q) = prev {
                if q >= cur {
                    bad.push((m, k - 1));
                }
            }
            prev = Some(cur);
        }
    }
    Ok(bad)
}

/// `p⁻¹(l(count − 1)) + 1`: the first `count` nonzero terms, and no later
/// ones, have appeared in `Σ a_{p(n)}` by this horizon once `count > m`.
pub fn matched_horizon(p: &dyn crate::series_core::Permutation, schedule: &PaddingSchedule, count: usize) -> Result<usize, PermError> {
    Ok(p.inverse(schedule.l(count - 1)?)? + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{flip_permutation, IntervalPartition};
    use crate::series_core::Identity;

    #[test]
    fn empty_family_is_successor() {
        let (s, _) = pad_against(vec![], &TermSource::AltHarmonic);
        assert_eq!(s.positions(6).unwrap(), vec![0, 1, 2, 3, 4, 5]);
        let (s, _) = pad_against(vec![Arc::new(Identity)], &TermSource::AltHarmonic);
        assert_eq!(s.positions(6).unwrap(), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn pair_flip_forces_gaps() {
        let p: Perm = Arc::new(flip_permutation(IntervalPartition::uniform(2).unwrap()));
        let (s, src) = pad_against(vec![p.clone()], &TermSource::AltHarmonic);
        // 1 is excluded: p⁻¹(1) = 0 ≤ p⁻¹(0) = 1; then p⁻¹(2) = 3
        assert_eq!(s.l(1).unwrap(), 2);
        assert!(order_violations(&[p], &s, 200).unwrap().is_empty());
        assert_eq!(src.scalar(s.l(1).unwrap()).unwrap(), -0.5);
        assert_eq!(src.scalar(1).unwrap(), 0.0);
        assert!(s.to_csv(3).unwrap().starts_with("k,l_k\n0,0\n1,2\n"));
    }

    #[test]
    fn iteration_positions() {
        let (s, src) = pad_by_iteration(IncFn::affine(2, 2).unwrap(), &TermSource::Harmonic).unwrap();
        assert_eq!(s.positions(5).unwrap(), vec![0, 2, 6, 14, 30]);
        assert_eq!(src.scalar(6).unwrap(), 1.0 / 3.0);
        assert_eq!(src.scalar(7).unwrap(), 0.0);
        let (s, _) = pad_by_iteration(IncFn::affine(1, 1).unwrap(), &TermSource::Harmonic).unwrap();
        assert_eq!(s.positions(4).unwrap(), vec![0, 1, 2, 3]);
        assert!(pad_by_iteration(IncFn::custom("flat", |_| 0), &TermSource::Harmonic).is_err());
    }
}
