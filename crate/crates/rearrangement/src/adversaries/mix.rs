//! A permutation that alternately agrees with `p` and with the identity on
//! longer and longer initial segments (as sets).

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::series_core::{Emitter, Perm, PermError, Permutation, Sequential};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StageKind {
    /// `g[[0, M)] = p[[0, M)]`
    Follows,
    /// `g[[0, M)] = [0, M)`
    Identity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub at: usize,
    pub kind: StageKind,
}

pub struct MixEmitter {
    p: Perm,
    pending: VecDeque<usize>,
    /// values already in the range of g
    taken: Vec<bool>,
    max_value: usize,
    emitted: usize,
    next_kind: StageKind,
    checkpoints: Vec<Checkpoint>,
}

impl MixEmitter {
    fn is_taken(&self, v: usize) -> bool {
        self.taken.get(v).copied().unwrap_or(false)
    }

    fn plan_stage(&mut self) -> Result<(), PermError> {
        let n = self.emitted;
        let (m, fresh): (usize, Vec<usize>) = match self.next_kind {
            StageKind::Follows => {
                // least M > n with ran g ⊆ p[[0, M)]
                let mut m = n + 1;
                for v in 0..self.taken.len() {
                    if self.taken[v] {
                        m = m.max(self.p.inverse(v)? + 1);
                    }
                }
                let mut fresh = Vec::new();
                for x in 0..m {
                    let v = self.p.forward(x)?;
                    if !self.is_taken(v) {
                        fresh.push(v);
                    }
                }
                fresh.sort_unstable();
                (m, fresh)
            }
            StageKind::Identity => {
                let m = (self.max_value + 1).max(n + 1);
                let fresh = (0..m).filter(|&v| !self.is_taken(v)).collect();
                (m, fresh)
            }
        };
        debug_assert_eq!(fresh.len(), m - n);
        self.pending.extend(fresh);
        self.checkpoints.push(Checkpoint { at: m, kind: self.next_kind });
        self.next_kind = match self.next_kind {
            StageKind::Follows => StageKind::Identity,
            StageKind::Identity => StageKind::Follows,
        };
        Ok(())
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }
}

impl Emitter for MixEmitter {
    fn next_value(&mut self) -> Result<usize, PermError> {
        while self.pending.is_empty() {
            self.plan_stage()?;
        }
        let v = self.pending.pop_front().expect("stage planned");
        if v >= self.taken.len() {
            self.taken.resize((v + 1).max(2 * self.taken.len()), false);
        }
        self.taken[v] = true;
        self.max_value = self.max_value.max(v);
        self.emitted += 1;
        Ok(v)
    }
    fn describe(&self) -> String {
        format!("mix({})", self.p.describe())
    }
}

pub type Mixed = Sequential<MixEmitter>;

/// Builds `g` stage by stage: first agreeing with `p` as sets on `[0, M₀)`,
/// then with the identity on `[0, M₁)`, and so on.
pub fn mix(p: Perm) -> Arc<Mixed> {
    Arc::new(Sequential::new(MixEmitter {
        p,
        pending: VecDeque::new(),
        taken: Vec::new(),
        max_value: 0,
        emitted: 0,
        next_kind: StageKind::Follows,
        checkpoints: Vec::new(),
    }))
}

/// Completed checkpoints with `at ≤ horizon` (extending `g` as needed).
pub fn mix_checkpoints(g: &Mixed, horizon: usize) -> Result<Vec<Checkpoint>, PermError> {
    g.extend_while(|e, generated| e.checkpoints.last().is_none_or(|c| c.at <= horizon) || generated < horizon)?;
    Ok(g.with_emitter(|e| e.checkpoints.iter().copied().filter(|c| c.at <= horizon).collect()))
}

/// Checks the set equality claimed at a checkpoint, exactly.
pub fn verify_checkpoint(g: &dyn Permutation, p: &dyn Permutation, c: Checkpoint) -> Result<bool, PermError> {
    let mut a = g.prefix(c.at)?;
    let mut b = match c.kind {
        StageKind::Follows => p.prefix(c.at)?,
        StageKind::Identity => (0..c.at).collect(),
    };
    a.sort_unstable();
    b.sort_unstable();
    Ok(a == b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{flip_permutation, IntervalPartition};
    use crate::series_core::{check_invariants, Identity};

    #[test]
    fn identity_mixes_to_identity() {
        let g = mix(Arc::new(Identity));
        assert_eq!(g.prefix(100).unwrap(), (0..100).collect::<Vec<_>>());
        for c in mix_checkpoints(&g, 100).unwrap() {
            assert!(verify_checkpoint(g.as_ref(), &Identity, c).unwrap());
        }
    }

    #[test]
    fn block_flip_checkpoints() {
        let p: Perm = Arc::new(flip_permutation(IntervalPartition::uniform(4).unwrap()));
        let g = mix(p.clone());
        let cps = mix_checkpoints(&g, 1000).unwrap();
        assert!(cps.iter().any(|c| c.kind == StageKind::Identity));
        for c in cps {
            assert!(verify_checkpoint(g.as_ref(), p.as_ref(), c).unwrap(), "{c:?}");
        }
        assert!(check_invariants(g.as_ref(), 2000).ok());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixExperiment {
    pub trajectory: crate::series_core::Trajectory,
    /// Checkpoints with the prefix sum `Σ_{n<M} a_{g(n)}` there.
    pub checkpoints: Vec<(Checkpoint, f64)>,
    /// Every checkpoint's set equality held exactly.
    pub verified: bool,
    pub verdict: crate::series_core::Verdict,
}

/// Sums `source` along `mix(p)`, sampling at every checkpoint in addition to
/// `sampling`.
pub fn mix_experiment(
    source: &crate::series_core::TermSource,
    p: Perm,
    horizon: usize,
    sampling: &crate::series_core::Sampling,
    tol: &crate::series_core::Tolerances,
) -> Result<MixExperiment, super::AdversaryError> {
    use crate::series_core::{classify, partial_sums, Sampling};
    let g = mix(p.clone());
    let cps = mix_checkpoints(&g, horizon)?;
    let mut verified = true;
    for &c in &cps {
        verified &= verify_checkpoint(g.as_ref(), p.as_ref(), c)?;
    }
    let mut idx = sampling.indices(horizon);
    idx.extend(cps.iter().map(|c| c.at - 1));
    idx.sort_unstable();
    idx.dedup();
    let trajectory = partial_sums(source, g.as_ref(), horizon, &Sampling::Explicit(idx))?;
    let checkpoints = cps
        .iter()
        .map(|&c| {
            let i = trajectory.indices.binary_search(&(c.at - 1)).expect("checkpoints are sampled");
            (c, trajectory.sums[i][0])
        })
        .collect();
    let verdict = classify(&trajectory, tol);
    Ok(MixExperiment { trajectory, checkpoints, verified, verdict })
}
