//! Finite proxy for "some rearrangement converges conditionally":
//! terms tend to zero while both one-signed parts diverge.

use serde::{Deserialize, Serialize};

use super::{CompensatedSum, SeriesError, TermSource};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PccThresholds {
    /// Largest |term| allowed over the final decade `[horizon/10, horizon)`.
    pub term_tol: f64,
    /// Both one-signed partial sums must exceed this in magnitude.
    pub blowup: f64,
}

impl Default for PccThresholds {
    fn default() -> Self {
        PccThresholds { term_tol: 0.05, blowup: 3.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PccReport {
    pub horizon: usize,
    pub max_term_final_decade: f64,
    pub positive_sum: f64,
    pub negative_sum: f64,
    /// `|P(a) ∩ [0, horizon)|`
    pub positive_count: usize,
    /// `|N(a) ∩ [0, horizon)|`
    pub negative_count: usize,
    pub pcc: bool,
}

pub fn pcc_check(source: &TermSource, horizon: usize) -> Result<PccReport, SeriesError> {
    pcc_check_with(source, horizon, &PccThresholds::default())
}

pub fn pcc_check_with(source: &TermSource, horizon: usize, th: &PccThresholds) -> Result<PccReport, SeriesError> {
    if source.dim() != 1 {
        return Err(SeriesError::DimensionMismatch { expected: 1, found: source.dim() });
    }
    let mut pos = CompensatedSum::new();
    let mut neg = CompensatedSum::new();
    let (mut np, mut nn) = (0, 0);
    let mut max_tail = 0.0f64;
    let decade = horizon / 10;
    for n in 0..horizon {
        let x = source.scalar(n)?;
        if x > 0.0 {
            pos.add(x);
            np += 1;
        } else if x < 0.0 {
            neg.add(x);
            nn += 1;
        }
        if n >= decade {
            max_tail = max_tail.max(x.abs());
        }
    }
    let (ps, ns) = (pos.value(), neg.value());
    let pcc = horizon > 0 && max_tail <= th.term_tol && ps > th.blowup && ns < -th.blowup;
    Ok(PccReport {
        horizon,
        max_term_final_decade: max_tail,
        positive_sum: ps,
        negative_sum: ns,
        positive_count: np,
        negative_count: nn,
        pcc,
    })
}
