//! Steering a vector series to a prescribed sum.
//!
//! Work proceeds in stages over a growing frontier `F`. At each stage every
//! unused index below `defer·F` must be emitted; among the unused indices in
//! `[defer·F, reach·F)` a subset is chosen (cost 1 for indices at or past the
//! frontier, 0 below it) whose terms, together with the forced ones, carry
//! the running sum to the target. The chosen terms are emitted nearest-first
//! toward the remaining gap, which keeps the intermediate sums close.
//!
//! Indices below the frontier that are skipped are deferred; indices past it
//! are pulled forward. Both are needed: a bounded displacement of the
//! identity order cannot change the sum.

use serde::{Deserialize, Serialize};

use super::kd::KdTree;
use super::kernel::{kernel_diagnostic, KernelVerdict};
use super::lp::{select, COLD, WARM};
use super::SteinitzError;
use crate::series_core::{pcc_check, PartialMap, Sampling, TermSource, Trajectory, TrajectoryBuilder};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteerConfig {
    /// Initial frontier.
    pub window: usize,
    /// Candidates reach up to `reach·F`.
    pub reach: f64,
    /// Frontier growth per stage.
    pub growth: f64,
    /// Indices below `defer·F` are forced out.
    pub defer: f64,
    /// Run the pcc and kernel checks before steering.
    pub check_preconditions: bool,
    pub sampling: Sampling,
}

impl Default for SteerConfig {
    fn default() -> Self {
        SteerConfig {
            window: 64,
            reach: 8.0,
            growth: 1.1,
            defer: 0.75,
            check_preconditions: true,
            sampling: Sampling::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteerReport {
    pub horizon: usize,
    /// Total indices placed (the last stage may run past the horizon).
    pub emitted: usize,
    pub stages: usize,
    pub final_error: f64,
    /// Largest `‖Sₙ − target‖` for `n ∈ [horizon/2, horizon)`.
    pub tail_max_error: f64,
    /// Every index below `covered` appears among the first `horizon` values.
    pub covered: usize,
    /// Largest ratio position/index over indices in `[64, covered)`.
    pub max_delay_ratio: f64,
}

pub struct Steering {
    /// Forward values `p(0), p(1), …` for all emitted positions.
    pub order: Vec<usize>,
    /// The same, completed to a bijection of ℕ.
    pub perm: PartialMap,
    pub trajectory: Trajectory,
    pub report: SteerReport,
}

/// Memoized terms, `d` values per index.
struct TermCache<'a> {
    source: &'a TermSource,
    d: usize,
    data: Vec<f64>,
}

impl TermCache<'_> {
    fn ensure(&mut self, n: usize) -> Result<(), SteinitzError> {
        let have = self.data.len() / self.d;
        if n <= have {
            return Ok(());
        }
        self.data.resize(n * self.d, 0.0);
        for i in have..n {
            self.source.term_into(i, &mut self.data[i * self.d..(i + 1) * self.d])?;
        }
        Ok(())
    }

    fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Checks the two preconditions: each coordinate passes the pcc proxy and no
/// bounded direction is found.
pub fn check_steering_preconditions(source: &TermSource, horizon: usize) -> Result<(), SteinitzError> {
    let h = horizon.clamp(10_000, 100_000);
    for c in 0..source.dim() {
        let coord = TermSource::rule(Coordinate { source: source.clone(), c });
        let r = pcc_check(&coord, h)?;
        if !r.pcc {
            return Err(SteinitzError::Precondition(format!("coordinate {c} fails the pcc proxy: {r:?}")));
        }
    }
    let k = kernel_diagnostic(source, h, (4 * source.dim()).max(2))?;
    if let KernelVerdict::DependentDirectionFound { direction } = k.verdict {
        return Err(SteinitzError::Dependent { direction });
    }
    Ok(())
}

struct Coordinate {
    source: TermSource,
    c: usize,
}

impl crate::series_core::TermRule for Coordinate {
    fn dim(&self) -> usize {
        1
    }
    fn term_into(&self, n: usize, out: &mut [f64]) -> Result<(), crate::series_core::SeriesError> {
        out[0] = self.source.term(n)?[self.c];
        Ok(())
    }
    fn describe(&self) -> String {
        format!("{}[{}]", self.source.describe(), self.c)
    }
}

/// Rearranges the `d`-dimensional series `source` toward `target`, emitting
/// `prefix` first.
pub fn levy_steinitz_rearrange(
    source: &TermSource,
    target: &[f64],
    prefix: &[usize],
    horizon: usize,
    cfg: &SteerConfig,
) -> Result<Steering, SteinitzError> {
    let d = source.dim();
    if target.len() != d {
        return Err(SteinitzError::Dimension { expected: d, found: target.len(), row: 0 });
    }
    if horizon == 0 {
        return Err(SteinitzError::Precondition("horizon must be positive".into()));
    }
    if !(cfg.window >= 1 && cfg.growth > 1.0 && cfg.defer > 0.0 && cfg.defer < 1.0 && cfg.reach > 1.0) {
        return Err(SteinitzError::Precondition(format!("invalid steering parameters {cfg:?}")));
    }

    let mut cache = TermCache { source, d, data: Vec::new() };
    let mut used: Vec<bool> = Vec::new();
    let mark = |used: &mut Vec<bool>, i: usize| -> bool {
        if i >= used.len() {
            used.resize((i + 1).max(2 * used.len()), false);
        }
        !std::mem::replace(&mut used[i], true)
    };
    let is_used = |used: &Vec<bool>, i: usize| used.get(i).copied().unwrap_or(false);

    let mut order: Vec<usize> = Vec::with_capacity(horizon + horizon / 4);
    let mut sum = crate::series_core::VectorSum::new(d);
    let mut errors: Vec<f64> = Vec::with_capacity(horizon);
    for &i in prefix {
        if !mark(&mut used, i) {
            return Err(SteinitzError::PrefixNotInjective(i));
        }
        cache.ensure(i + 1)?;
        sum.add(cache.get(i));
        order.push(i);
        errors.push(dist(&sum.value(), target));
    }

    if cfg.check_preconditions {
        check_steering_preconditions(source, horizon)?;
    }

    let mut frontier = cfg.window;
    let mut lambda = vec![0.0; d];
    let mut cold = true;
    let mut stages = 0;
    // everything below `low` is used
    let mut low = 0;
    while order.len() < horizon {
        stages += 1;
        let lo = (frontier as f64 * cfg.defer) as usize;
        let hi = ((frontier as f64 * cfg.reach) as usize).max(lo + 1);
        cache.ensure(hi)?;
        while is_used(&used, low) {
            low += 1;
        }
        let forced: Vec<usize> = (low..lo).filter(|&i| !is_used(&used, i)).collect();
        let s = sum.value();
        let mut gap: Vec<f64> = (0..d).map(|k| target[k] - s[k]).collect();
        for &i in &forced {
            for (g, t) in gap.iter_mut().zip(cache.get(i)) {
                *g -= t;
            }
        }
        let cand: Vec<usize> = (lo.max(low)..hi).filter(|&i| !is_used(&used, i)).collect();
        let mut cv = Vec::with_capacity(cand.len() * d);
        for &i in &cand {
            cv.extend_from_slice(cache.get(i));
        }
        let cost: Vec<f64> = cand.iter().map(|&i| if i >= frontier { 1.0 } else { 0.0 }).collect();
        let pick = select(d, &cv, &cost, &gap, &mut lambda, if cold { COLD } else { WARM });
        cold = false;

        let mut stage: Vec<usize> = forced;
        stage.extend(cand.iter().zip(&pick).filter(|p| *p.1).map(|p| *p.0));
        let mut pts = Vec::with_capacity(stage.len() * d);
        for &i in &stage {
            pts.extend_from_slice(cache.get(i));
        }
        let mut tree = KdTree::new(d, pts);
        let mut want = vec![0.0; d];
        for _ in 0..stage.len() {
            let s = sum.value();
            for k in 0..d {
                want[k] = target[k] - s[k];
            }
            let j = tree.nearest(&want).expect("stage items remain");
            tree.remove(j);
            let i = stage[j];
            mark(&mut used, i);
            sum.add(cache.get(i));
            order.push(i);
            errors.push(dist(&sum.value(), target));
        }
        frontier = ((frontier as f64 * cfg.growth).ceil() as usize).max(frontier + 1);
    }

    let perm = PartialMap::from_values(&order)?;
    let mut tb = TrajectoryBuilder::new(d, horizon, &cfg.sampling);
    for &i in &order[..horizon] {
        tb.push(cache.get(i));
    }
    let trajectory = tb.finish();

    let mut seen = vec![false; horizon + 1];
    for &i in &order[..horizon] {
        if i <= horizon {
            seen[i] = true;
        }
    }
    let covered = seen.iter().position(|s| !s).unwrap_or(horizon + 1);
    let mut max_delay_ratio = 0.0f64;
    for (pos, &i) in order[..horizon].iter().enumerate() {
        if (64..covered).contains(&i) {
            max_delay_ratio = max_delay_ratio.max(pos as f64 / i as f64);
        }
    }
    let report = SteerReport {
        horizon,
        emitted: order.len(),
        stages,
        final_error: errors[horizon - 1],
        tail_max_error: errors[horizon / 2..horizon].iter().cloned().fold(0.0, f64::max),
        covered,
        max_delay_ratio,
    };
    Ok(Steering { order, perm, trajectory, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series_core::{check_invariants, Permutation};

    fn pair() -> TermSource {
        TermSource::stack(vec![TermSource::AltHarmonic, TermSource::alt_power(0.6).unwrap()]).unwrap()
    }

    #[test]
    fn prefix_is_emitted_first() {
        let prefix = [7, 3, 0, 12, 5, 1, 9, 2];
        let s = levy_steinitz_rearrange(&pair(), &[0.7, 0.6], &prefix, 2_000, &SteerConfig::default()).unwrap();
        assert_eq!(&s.order[..8], &prefix);
        for (n, &v) in prefix.iter().enumerate() {
            assert_eq!(s.perm.forward(n).unwrap(), v);
        }
        assert!(check_invariants(&s.perm, 5_000).ok());
    }

    #[test]
    fn repeated_prefix_rejected() {
        let e = levy_steinitz_rearrange(&pair(), &[0.7, 0.6], &[1, 1], 100, &SteerConfig::default()).err();
        assert_eq!(e, Some(SteinitzError::PrefixNotInjective(1)));
    }

    #[test]
    fn dependent_series_refused() {
        let s = TermSource::stack(vec![TermSource::AltHarmonic, TermSource::AltHarmonic]).unwrap();
        let e = levy_steinitz_rearrange(&s, &[0.5, 0.5], &[], 1_000, &SteerConfig::default()).err();
        assert!(matches!(e, Some(SteinitzError::Dependent { .. })), "{e:?}");
    }

    #[test]
    fn scalar_target_like_riemann() {
        let s = levy_steinitz_rearrange(&TermSource::AltHarmonic, &[0.25], &[], 20_000, &SteerConfig::default()).unwrap();
        assert!(s.report.final_error < 1e-3, "{:?}", s.report);
    }
}
