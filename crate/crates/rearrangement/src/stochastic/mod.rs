//! Random-sign series `Σ (−1)^{s(n)} cₙ` and Monte Carlo proxies for their
//! almost-sure behaviour.
//!
//! Signs come from ChaCha8 (`rand_chacha` 0.9) seeded with
//! `seed_from_u64(seed)`: `s(n)` is bit `n mod 32` of the `⌊n/32⌋`-th 32-bit
//! output. Trial `t` of a Monte Carlo run uses seed `seed + t` (wrapping).

use std::sync::{Arc, RwLock};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::series_core::{
    partial_sums, CompensatedSum, Permutation, Sampling, SeriesError, TermRule, TermSource, Trajectory, TrajectoryError,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StochasticError {
    #[error("magnitude c_{index} = {value} is negative")]
    NegativeMagnitude { index: usize, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
}

/// A reproducible random sequence `s: ℕ → {0, 1}`.
#[derive(Clone)]
pub struct SignVector {
    seed: u64,
    words: Arc<RwLock<(ChaCha8Rng, Vec<u32>)>>,
}

impl std::fmt::Debug for SignVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SignVector {{ seed: {} }}", self.seed)
    }
}

impl SignVector {
    pub fn new(seed: u64) -> Self {
        SignVector { seed, words: Arc::new(RwLock::new((ChaCha8Rng::seed_from_u64(seed), Vec::new()))) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `s(n)`
    pub fn bit(&self, n: usize) -> bool {
        let w = n / 32;
        {
            let g = self.words.read().unwrap();
            if let Some(&x) = g.1.get(w) {
                return x >> (n % 32) & 1 == 1;
            }
        }
        let mut g = self.words.write().unwrap();
        let (rng, words) = &mut *g;
        while words.len() <= w {
            words.push(rng.next_u32());
        }
        words[w] >> (n % 32) & 1 == 1
    }

    /// `(−1)^{s(n)}`
    pub fn sign(&self, n: usize) -> f64 {
        if self.bit(n) {
            -1.0
        } else {
            1.0
        }
    }
}

/// Sequential sign stream with the same bits as [`SignVector`], without the memo.
struct SignStream {
    rng: ChaCha8Rng,
    word: u32,
    left: u32,
}

impl SignStream {
    fn new(seed: u64) -> Self {
        SignStream { rng: ChaCha8Rng::seed_from_u64(seed), word: 0, left: 0 }
    }

    #[inline]
    fn next_sign(&mut self) -> f64 {
        if self.left == 0 {
            self.word = self.rng.next_u32();
            self.left = 32;
        }
        let b = self.word & 1;
        self.word >>= 1;
        self.left -= 1;
        if b == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

struct Signed {
    signs: SignVector,
    mags: TermSource,
}

impl TermRule for Signed {
    fn dim(&self) -> usize {
        1
    }
    fn term_into(&self, n: usize, out: &mut [f64]) -> Result<(), SeriesError> {
        let c = self.mags.scalar(n)?;
        if c < 0.0 {
            return Err(SeriesError::InvalidParameter(format!("magnitude c_{n} = {c} is negative")));
        }
        out[0] = self.signs.sign(n) * c;
        Ok(())
    }
    fn describe(&self) -> String {
        format!("signed({},seed={})", self.mags.describe(), self.signs.seed)
    }
}

/// Checked eagerly on this many leading terms.
const EAGER_CHECK: usize = 1024;

fn check_magnitudes(mags: &TermSource, n: usize) -> Result<(), StochasticError> {
    if mags.dim() != 1 {
        return Err(SeriesError::DimensionMismatch { expected: 1, found: mags.dim() }.into());
    }
    for i in 0..n {
        let c = mags.scalar(i)?;
        if c < 0.0 {
            return Err(StochasticError::NegativeMagnitude { index: i, value: c });
        }
    }
    Ok(())
}

/// The signs `s` for `seed` and the series `(−1)^{s(n)} cₙ`.
///
/// The leading magnitudes are checked here; a negative one further out
/// surfaces as an error when that term is evaluated.
pub fn random_signs(mags: &TermSource, seed: u64) -> Result<(SignVector, TermSource), StochasticError> {
    check_magnitudes(mags, EAGER_CHECK)?;
    let signs = SignVector::new(seed);
    let src = TermSource::rule(Signed { signs: signs.clone(), mags: mags.clone() });
    Ok((signs, src))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: usize,
    pub horizon: usize,
    /// Tail oscillation is measured over this many final prefix sums.
    pub window: usize,
    pub osc_tol: f64,
    pub blowup: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub trials: usize,
    pub horizon: usize,
    pub window: usize,
    pub osc_tol: f64,
    pub blowup: f64,
    pub seed: u64,
    /// Per trial: max − min of the prefix sums over the final window.
    pub tail_osc: Vec<f64>,
    /// Per trial: `max |Sₙ|`.
    pub running_max: Vec<f64>,
    /// Fraction of trials with `tail_osc < osc_tol`.
    pub convergence_proxy: f64,
    /// Fraction of trials with `running_max > blowup`.
    pub divergence_proxy: f64,
}

impl McReport {
    /// `trial,tail_osc,running_max` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,tail_osc,running_max\n");
        for (t, (o, m)) in self.tail_osc.iter().zip(&self.running_max).enumerate() {
            s.push_str(&format!("{t},{o},{m}\n"));
        }
        s
    }

    /// Recompute both proxies for other thresholds.
    pub fn proxies(&self, osc_tol: f64, blowup: f64) -> (f64, f64) {
        let n = self.trials as f64;
        let conv = self.tail_osc.iter().filter(|&&o| o < osc_tol).count() as f64 / n;
        let div = self.running_max.iter().filter(|&&m| m > blowup).count() as f64 / n;
        (conv, div)
    }
}

fn run_trial(mags: &[f64], window: usize, seed: u64) -> (f64, f64) {
    let mut signs = SignStream::new(seed);
    let mut sum = CompensatedSum::new();
    let mut max_abs = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let tail_from = mags.len().saturating_sub(window);
    for (n, &c) in mags.iter().enumerate() {
        sum.add(signs.next_sign() * c);
        let s = sum.value();
        max_abs = max_abs.max(s.abs());
        if n >= tail_from {
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    (hi - lo, max_abs)
}

pub fn rademacher_mc(mags: &TermSource, cfg: &McConfig) -> Result<McReport, StochasticError> {
    if cfg.trials == 0 {
        return Err(StochasticError::InvalidParameter("need at least one trial".into()));
    }
    if cfg.horizon == 0 || cfg.window == 0 || cfg.window > cfg.horizon {
        return Err(StochasticError::InvalidParameter(format!(
            "need 0 < window ≤ horizon, got window {} and horizon {}",
            cfg.window, cfg.horizon
        )));
    }
    check_magnitudes(mags, 0)?;
    let c: Vec<f64> = (0..cfg.horizon).map(|n| mags.scalar(n)).collect::<Result<_, _>>()?;
    if let Some((i, &v)) = c.iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(StochasticError::NegativeMagnitude { index: i, value: v });
    }
    // each trial has its own stream, so the split across threads is irrelevant
    let per: Vec<(f64, f64)> =
        (0..cfg.trials).into_par_iter().map(|t| run_trial(&c, cfg.window, cfg.seed.wrapping_add(t as u64))).collect();
    let (tail_osc, running_max): (Vec<f64>, Vec<f64>) = per.into_iter().unzip();
    let mut r = McReport {
        trials: cfg.trials,
        horizon: cfg.horizon,
        window: cfg.window,
        osc_tol: cfg.osc_tol,
        blowup: cfg.blowup,
        seed: cfg.seed,
        tail_osc,
        running_max,
        convergence_proxy: 0.0,
        divergence_proxy: 0.0,
    };
    (r.convergence_proxy, r.divergence_proxy) = r.proxies(cfg.osc_tol, cfg.blowup);
    Ok(r)
}

/// Prefix sums of `Σ (−1)^{s(p(n))} / (p(n) + 1)`.
pub fn bp_experiment(p: &dyn Permutation, seed: u64, horizon: usize, sampling: &Sampling) -> Result<Trajectory, StochasticError> {
    let (_, src) = random_signs(&TermSource::Harmonic, seed)?;
    Ok(partial_sums(&src, p, horizon, sampling)?)
}
