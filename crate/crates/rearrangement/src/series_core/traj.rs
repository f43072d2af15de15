//! Prefix-sum trajectories of rearranged series.

use serde::{Deserialize, Serialize};

use super::{Permutation, SeriesError, TermSource, VectorSum};

/// Which prefix sums a trajectory keeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Sampling {
    /// Every index below `dense`, then `per_decade` geometric checkpoints per decade.
    Geometric { dense: usize, per_decade: usize },
    /// Every `k`-th index (and the last).
    Every(usize),
    /// Exactly these indices (those below the horizon), plus the last.
    Explicit(Vec<usize>),
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling::Geometric { dense: 100, per_decade: 40 }
    }
}

impl Sampling {
    /// Sorted, distinct sample indices in `[0, horizon)`, always ending at `horizon - 1`.
    pub fn indices(&self, horizon: usize) -> Vec<usize> {
        if horizon == 0 {
            return Vec::new();
        }
        let last = horizon - 1;
        let mut out: Vec<usize> = match self {
            Sampling::Geometric { dense, per_decade } => {
                let mut v: Vec<usize> = (0..(*dense).min(horizon)).collect();
                if *per_decade > 0 {
                    let mut k = 0u32;
                    loop {
                        let x = 10f64.powf(k as f64 / *per_decade as f64).round() as usize;
                        if x > last {
                            break;
                        }
                        if x >= *dense {
                            v.push(x);
                        }
                        k += 1;
                    }
                }
                v
            }
            Sampling::Every(k) => (0..horizon).step_by((*k).max(1)).collect(),
            Sampling::Explicit(ix) => ix.iter().copied().filter(|&i| i < horizon).collect(),
        };
        out.push(last);
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Sampled prefix sums `S_n = Σ_{k≤n} a_{p(k)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub horizon: usize,
    pub dim: usize,
    /// Sampled indices `n` (the sum includes the term at position `n`).
    pub indices: Vec<usize>,
    /// `sums[i]` is the d-vector `S_{indices[i]}`.
    pub sums: Vec<Vec<f64>>,
    /// Norm of `a_{p(n)}` at each sampled `n`.
    pub last_term_mag: Vec<f64>,
    /// Running extremes of each coordinate over every index, not only samples.
    pub run_min: Vec<f64>,
    pub run_max: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Coordinate `c` of every sample.
    pub fn coord(&self, c: usize) -> Vec<f64> {
        self.sums.iter().map(|s| s[c]).collect()
    }

    pub fn final_sum(&self) -> &[f64] {
        self.sums.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Build directly from every prefix sum (index `n` at position `n`).
    pub fn from_dense(values: &[Vec<f64>], mags: &[f64], sampling: &Sampling) -> Self {
        let horizon = values.len();
        let dim = values.first().map(|v| v.len()).unwrap_or(0);
        let mut run_min = vec![f64::INFINITY; dim];
        let mut run_max = vec![f64::NEG_INFINITY; dim];
        for v in values {
            for c in 0..dim {
                run_min[c] = run_min[c].min(v[c]);
                run_max[c] = run_max[c].max(v[c]);
            }
        }
        let indices = sampling.indices(horizon);
        let sums = indices.iter().map(|&i| values[i].clone()).collect();
        let last_term_mag = indices.iter().map(|&i| mags[i]).collect();
        Trajectory { horizon, dim, indices, sums, last_term_mag, run_min, run_max }
    }
}

/// Incremental builder shared by everything that records trajectories.
pub struct TrajectoryBuilder {
    samples: Vec<usize>,
    next: usize,
    sum: VectorSum,
    traj: Trajectory,
    count: usize,
}

impl TrajectoryBuilder {
    pub fn new(dim: usize, horizon: usize, sampling: &Sampling) -> Self {
        let samples = sampling.indices(horizon);
        TrajectoryBuilder {
            next: 0,
            sum: VectorSum::new(dim),
            traj: Trajectory {
                horizon,
                dim,
                indices: Vec::with_capacity(samples.len()),
                sums: Vec::with_capacity(samples.len()),
                last_term_mag: Vec::with_capacity(samples.len()),
                run_min: vec![f64::INFINITY; dim],
                run_max: vec![f64::NEG_INFINITY; dim],
            },
            samples,
            count: 0,
        }
    }

    /// Add the next term (position `count`).
    #[inline]
    pub fn push(&mut self, term: &[f64]) {
        self.sum.add(term);
        let n = self.count;
        self.count += 1;
        for c in 0..self.traj.dim {
            let v = self.sum.coord(c);
            if v < self.traj.run_min[c] {
                self.traj.run_min[c] = v;
            }
            if v > self.traj.run_max[c] {
                self.traj.run_max[c] = v;
            }
        }
        if self.next < self.samples.len() && self.samples[self.next] == n {
            self.next += 1;
            self.traj.indices.push(n);
            self.traj.sums.push(self.sum.value());
            self.traj.last_term_mag.push(term.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
    }

    /// Current (unsampled) prefix sum.
    pub fn current(&self) -> Vec<f64> {
        self.sum.value()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(self) -> Trajectory {
        self.traj
    }
}

/// Failure while evaluating a trajectory.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrajectoryError {
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Perm(#[from] super::PermError),
}

/// Sampled prefix sums of `Σ a_{p(n)}` up to `horizon`.
pub fn partial_sums(
    source: &TermSource,
    perm: &dyn Permutation,
    horizon: usize,
    sampling: &Sampling,
) -> Result<Trajectory, TrajectoryError> {
    if horizon == 0 {
        return Err(TrajectoryError::EmptyHorizon);
    }
    let order = perm.prefix(horizon)?;
    let dim = source.dim();
    let mut b = TrajectoryBuilder::new(dim, horizon, sampling);
    let mut buf = vec![0.0; dim];
    for &k in &order {
        source.term_into(k, &mut buf)?;
        b.push(&buf);
    }
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::{compensated, Identity};

    #[test]
    fn short_alternating_harmonic() {
        let t = partial_sums(&TermSource::AltHarmonic, &Identity, 2, &Sampling::default()).unwrap();
        assert_eq!(t.indices, vec![0, 1]);
        assert_eq!(t.coord(0), vec![1.0, 0.5]);
        assert_eq!(t.last_term_mag, vec![1.0, 0.5]);
        assert_eq!(t.run_min, vec![0.5]);
        assert_eq!(t.run_max, vec![1.0]);
    }

    #[test]
    fn alt_power_half_by_hand() {
        let s = TermSource::alt_power(0.5).unwrap();
        let t = partial_sums(&s, &Identity, 4, &Sampling::default()).unwrap();
        let expect = 1.0 - 2f64.powf(-0.5) + 3f64.powf(-0.5) - 4f64.powf(-0.5);
        assert!((t.final_sum()[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn identity_matches_direct_compensated_sum() {
        let s = TermSource::alt_power(0.7).unwrap();
        let t = partial_sums(&s, &Identity, 5000, &Sampling::Every(1)).unwrap();
        for (i, &n) in t.indices.iter().enumerate().step_by(97) {
            let direct = compensated((0..=n).map(|k| s.scalar(k).unwrap()));
            assert_eq!(direct.to_bits(), t.sums[i][0].to_bits());
        }
    }

    #[test]
    fn sampling_shapes() {
        let ix = Sampling::default().indices(100_000);
        assert_eq!(ix[..100], (0..100).collect::<Vec<_>>()[..]);
        assert_eq!(*ix.last().unwrap(), 99_999);
        assert!(ix.windows(2).all(|w| w[0] < w[1]));
        assert!(ix.contains(&10_000));
        assert_eq!(Sampling::Every(10).indices(25), vec![0, 10, 20, 24]);
        assert_eq!(Sampling::Explicit(vec![5, 2, 40]).indices(10), vec![2, 5, 9]);
        assert!(Sampling::default().indices(0).is_empty());
    }

    #[test]
    fn zero_horizon_is_rejected() {
        assert_eq!(partial_sums(&TermSource::Zero, &Identity, 0, &Sampling::default()), Err(TrajectoryError::EmptyHorizon));
    }
}
