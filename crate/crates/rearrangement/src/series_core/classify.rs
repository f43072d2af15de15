//! Finite-horizon classification of trajectories.
//!
//! Convergence, divergence and oscillation are limit notions; here they are
//! judged on the last `window` samples with explicit knobs, and anything that
//! fits none of the rules is reported as undetermined rather than guessed.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Trajectory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative settling tolerance: samples within `settle * max(1, |x|)` of their mean `x`.
    pub settle: f64,
    /// Number of trailing samples examined.
    pub window: usize,
    pub blowup: f64,
    pub gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { settle: 1e-3, window: 20, blowup: 10.0, gap: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    ConvergesTo { value: f64, residual: f64 },
    DivergesPlus { witness: f64, index: usize },
    DivergesMinus { witness: f64, index: usize },
    Oscillates { liminf: f64, limsup: f64 },
    Undetermined { reason: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ConvergesTo { .. } => "converges-to",
            Verdict::DivergesPlus { .. } => "diverges-plus",
            Verdict::DivergesMinus { .. } => "diverges-minus",
            Verdict::Oscillates { .. } => "oscillates",
            Verdict::Undetermined { .. } => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ConvergesTo { value, residual } => write!(f, "converges-to({value}, residual {residual:.3e})"),
            Verdict::DivergesPlus { witness, index } => write!(f, "diverges-plus(>{witness} at {index})"),
            Verdict::DivergesMinus { witness, index } => write!(f, "diverges-minus(<{witness} at {index})"),
            Verdict::Oscillates { liminf, limsup } => write!(f, "oscillates({liminf}, {limsup})"),
            Verdict::Undetermined { reason } => write!(f, "undetermined({reason})"),
        }
    }
}

/// Classify coordinate 0.
pub fn classify(traj: &Trajectory, tol: &Tolerances) -> Verdict {
    classify_coord(traj, 0, tol)
}

pub fn classify_coord(traj: &Trajectory, coord: usize, tol: &Tolerances) -> Verdict {
    if coord >= traj.dim {
        return Verdict::Undetermined { reason: format!("no coordinate {coord}") };
    }
    classify_values(&traj.indices, &traj.coord(coord), tol)
}

/// Classification on raw `(index, value)` samples.
pub fn classify_values(indices: &[usize], values: &[f64], tol: &Tolerances) -> Verdict {
    if values.len() < 10 {
        return Verdict::Undetermined { reason: format!("only {} samples", values.len()) };
    }
    let w = tol.window.clamp(2, values.len());
    let tail = &values[values.len() - w..];
    let last_index = indices.last().copied().unwrap_or(0);
    let mean = tail.iter().sum::<f64>() / w as f64;
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !mean.is_finite() {
        return Verdict::Undetermined { reason: "non-finite samples".into() };
    }
    let residual = tail.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if residual <= tol.settle * mean.abs().max(1.0) {
        return Verdict::ConvergesTo { value: mean, residual };
    }
    let (first, last) = (tail[0], tail[w - 1]);
    if lo > tol.blowup && last > first {
        return Verdict::DivergesPlus { witness: lo, index: last_index };
    }
    if hi < -tol.blowup && last < first {
        return Verdict::DivergesMinus { witness: hi, index: last_index };
    }
    if hi - lo > tol.gap {
        return Verdict::Oscillates { liminf: lo, limsup: hi };
    }
    Verdict::Undetermined { reason: format!("spread {:.3e} in final window of {w} samples", hi - lo) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn constant_converges() {
        let v = vec![2.5; 30];
        assert_eq!(classify_values(&ix(30), &v, &Tolerances::default()), Verdict::ConvergesTo { value: 2.5, residual: 0.0 });
    }

    #[test]
    fn relative_settle_for_large_values() {
        let v: Vec<f64> = (0..30).map(|i| 1000.0 + 0.5 * ((i % 2) as f64)).collect();
        assert_eq!(classify_values(&ix(30), &v, &Tolerances::default()).name(), "converges-to");
    }

    #[test]
    fn growth_diverges() {
        let v: Vec<f64> = (0..30).map(|i| 20.0 + i as f64).collect();
        assert_eq!(classify_values(&ix(30), &v, &Tolerances::default()).name(), "diverges-plus");
        let w: Vec<f64> = v.iter().map(|x| -x).collect();
        assert_eq!(classify_values(&ix(30), &w, &Tolerances::default()).name(), "diverges-minus");
    }

    #[test]
    fn swings_oscillate() {
        let v: Vec<f64> = (0..30).map(|i| if i % 4 < 2 { 0.5 } else { -0.5 }).collect();
        assert_eq!(classify_values(&ix(30), &v, &Tolerances::default()), Verdict::Oscillates { liminf: -0.5, limsup: 0.5 });
    }

    #[test]
    fn too_few_samples_or_small_drift_is_undetermined() {
        assert_eq!(classify_values(&ix(5), &[0.0; 5], &Tolerances::default()).name(), "undetermined");
        let v: Vec<f64> = (0..30).map(|i| i as f64 * 1e-3).collect();
        assert_eq!(classify_values(&ix(30), &v, &Tolerances::default()).name(), "undetermined");
    }
}
