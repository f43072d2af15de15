//! Order-preserving shuffles `s_{A,B}` and the two-exponent experiment.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sets::{ExcessSchedule, Progression, SetRef, SetSource};
use super::RearrangeError;
use crate::series_core::{PermError, Permutation, Sampling, TermSource, Trajectory, TrajectoryBuilder};

/// Maps the k-th element of `A` to the k-th element of `B`, and the k-th
/// element of `ℕ∖A` to the k-th element of `ℕ∖B`.
#[derive(Clone)]
pub struct Shuffle {
    a: SetRef,
    b: SetRef,
}

impl Shuffle {
    pub fn new(a: SetRef, b: SetRef) -> Self {
        Shuffle { a, b }
    }

    /// `s_{B,A}`
    pub fn inverse_shuffle(&self) -> Shuffle {
        Shuffle { a: self.b.clone(), b: self.a.clone() }
    }

    fn map(from: &dyn SetSource, to: &dyn SetSource, n: usize) -> usize {
        if from.contains(n) {
            to.nth(from.rank(n))
        } else {
            to.complement_nth(from.complement_rank(n))
        }
    }
}

impl Permutation for Shuffle {
    fn forward(&self, n: usize) -> Result<usize, PermError> {
        Ok(Self::map(self.a.as_ref(), self.b.as_ref(), n))
    }
    fn inverse(&self, m: usize) -> Result<usize, PermError> {
        Ok(Self::map(self.b.as_ref(), self.a.as_ref(), m))
    }
    fn describe(&self) -> String {
        format!("shuffle:a={},b={}", self.a.describe(), self.b.describe())
    }
}

/// `s_A = s_{A, evens}`: positions in `A` receive the positive terms of an
/// alternating series.
pub fn shuffle_onto_evens(a: SetRef) -> Shuffle {
    Shuffle::new(a, Arc::new(Progression::evens()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoExponentReport {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    /// Number of negative terms placed.
    pub negatives: usize,
    pub horizon: usize,
    pub max_alpha: f64,
    pub final_alpha: f64,
    pub final_beta: f64,
    /// Spread (max − min) of the β-trajectory over its final window.
    pub beta_window_spread: f64,
    pub beta_window: usize,
    /// Least-squares slope of log S_α against log m over the last decade
    /// (compare with β − α).
    pub alpha_growth_exponent: Option<f64>,
}

/// Paired trajectories of `Σ (−1)^{s_A(n)} (s_A(n)+1)^{−γ}`, γ ∈ {α, β}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoExponentResult {
    pub sum_alpha: Trajectory,
    pub sum_beta: Trajectory,
    pub report: TwoExponentReport,
}

/// Run `negatives` negative-term stages of the shuffle built from
/// `excess_schedule_set(beta, c)`, applied to both `S_α` and `S_β`.
pub fn two_exponent_experiment(
    alpha: f64,
    beta: f64,
    c: f64,
    negatives: usize,
    sampling: &Sampling,
) -> Result<TwoExponentResult, RearrangeError> {
    if !(alpha > 0.0 && alpha < beta && beta < 1.0) {
        return Err(RearrangeError::Precondition(format!("need 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}")));
    }
    if negatives == 0 {
        return Err(RearrangeError::Precondition("need at least one negative term".into()));
    }
    let sched = ExcessSchedule::new(beta, c, negatives)?;
    // position of the last negative term placed, inclusive
    let horizon = sched.negative_position(negatives) + 1;
    let shuffle = shuffle_onto_evens(Arc::new(sched));
    let sa = TermSource::alt_power(alpha)?;
    let sb = TermSource::alt_power(beta)?;
    let mut ta = TrajectoryBuilder::new(1, horizon, sampling);
    let mut tb = TrajectoryBuilder::new(1, horizon, sampling);
    // sum after each negative term, for the growth fit
    let mut at_negative: Vec<(usize, f64)> = Vec::with_capacity(negatives);
    let mut m = 0;
    for n in 0..horizon {
        let k = shuffle.forward(n)?;
        let xa = sa.scalar(k)?;
        ta.push(&[xa]);
        tb.push(&[sb.scalar(k)?]);
        if k % 2 == 1 {
            m += 1;
            at_negative.push((m, ta.current()[0]));
        }
    }
    let (sum_alpha, sum_beta) = (ta.finish(), tb.finish());
    let window = 20.min(sum_beta.len());
    let tail = &sum_beta.coord(0)[sum_beta.len() - window..];
    let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let report = TwoExponentReport {
        alpha,
        beta,
        c,
        negatives,
        horizon,
        max_alpha: sum_alpha.run_max[0],
        final_alpha: sum_alpha.final_sum()[0],
        final_beta: sum_beta.final_sum()[0],
        beta_window_spread: spread,
        beta_window: window,
        alpha_growth_exponent: log_slope(&at_negative, negatives / 10),
    };
    Ok(TwoExponentResult { sum_alpha, sum_beta, report })
}

/// Slope of log y against log x for points with x ≥ from and y > 0.
fn log_slope(pts: &[(usize, f64)], from: usize) -> Option<f64> {
    let v: Vec<(f64, f64)> =
        pts.iter().filter(|(x, y)| *x >= from.max(1) && *y > 0.0).map(|&(x, y)| ((x as f64).ln(), y.ln())).collect();
    if v.len() < 2 {
        return None;
    }
    let n = v.len() as f64;
    let mx = v.iter().map(|p| p.0).sum::<f64>() / n;
    let my = v.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = v.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = v.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
