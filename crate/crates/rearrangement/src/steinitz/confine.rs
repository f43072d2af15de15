//! Polygonal confinement: order vectors (first one fixed) so that every
//! prefix sum stays short.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SteinitzError;

/// Largest batch the exhaustive search accepts.
pub const BRUTEFORCE_LIMIT: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorBatch {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl VectorBatch {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, SteinitzError> {
        if dim == 0 {
            return Err(SteinitzError::Dimension { expected: 1, found: 0, row: 0 });
        }
        for (row, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(SteinitzError::Dimension { expected: dim, found: v.len(), row });
            }
        }
        Ok(VectorBatch { dim, vectors })
    }

    /// One vector per non-empty line, coordinates separated by commas.
    pub fn parse(text: &str) -> Result<Self, SteinitzError> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| SteinitzError::Parse { line: i + 1, message: e.to_string() })?;
            rows.push(row);
        }
        let dim = rows.first().map(Vec::len).ok_or(SteinitzError::Empty)?;
        Self::new(dim, rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// `ρ = max ‖vᵢ‖`
    pub fn max_norm(&self) -> f64 {
        self.vectors.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    /// `b = Σ vᵢ`
    pub fn total(&self) -> Vec<f64> {
        let mut b = vec![0.0; self.dim];
        for v in &self.vectors {
            add(&mut b, v);
        }
        b
    }

    /// `ρ·C(d) + ‖b‖` with the stand-in constant `C(d) = d`.
    pub fn reference_bound(&self) -> f64 {
        self.max_norm() * self.dim as f64 + norm(&self.total())
    }

    /// Largest prefix-sum norm along `ordering`.
    pub fn prefix_bound(&self, ordering: &[usize]) -> f64 {
        let mut s = vec![0.0; self.dim];
        let mut m = 0.0f64;
        for &i in ordering {
            add(&mut s, &self.vectors[i]);
            m = m.max(norm(&s));
        }
        m
    }
}

#[inline]
fn add(s: &mut [f64], v: &[f64]) {
    for (a, b) in s.iter_mut().zip(v) {
        *a += b;
    }
}

#[inline]
fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfinementResult {
    /// Indices in emission order; always starts with 0.
    pub ordering: Vec<usize>,
    pub achieved: f64,
    pub reference: f64,
}

impl ConfinementResult {
    fn new(batch: &VectorBatch, ordering: Vec<usize>) -> Self {
        let achieved = batch.prefix_bound(&ordering);
        ConfinementResult { ordering, achieved, reference: batch.reference_bound() }
    }
}

/// Exact minimiser of the prefix bound over all orderings with `v₀` first.
/// Ties go to the lexicographically first ordering.
pub fn confine_bruteforce(batch: &VectorBatch) -> Result<ConfinementResult, SteinitzError> {
    let n = batch.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(SteinitzError::TooLarge { n, limit: BRUTEFORCE_LIMIT });
    }
    if n == 0 {
        return Err(SteinitzError::Empty);
    }
    let d = batch.dim();
    let v0 = &batch.vectors[0];
    let start = norm(v0);
    if n == 1 {
        return Ok(ConfinementResult::new(batch, vec![0]));
    }
    // one branch per choice of the second vector
    let branches: Vec<(f64, Vec<usize>)> = (1..n)
        .into_par_iter()
        .map(|first| {
            let mut s = v0.clone();
            add(&mut s, &batch.vectors[first]);
            let mut search = Search {
                batch,
                d,
                best: f64::INFINITY,
                best_order: Vec::new(),
                order: vec![0, first],
                used: (0..n).map(|i| i == 0 || i == first).collect(),
            };
            search.dfs(&s, start.max(norm(&s)));
            (search.best, search.best_order)
        })
        .collect();
    let mut best = (f64::INFINITY, Vec::new());
    for b in branches {
        if b.0 < best.0 {
            best = b;
        }
    }
    Ok(ConfinementResult::new(batch, best.1))
}

struct Search<'a> {
    batch: &'a VectorBatch,
    d: usize,
    best: f64,
    best_order: Vec<usize>,
    order: Vec<usize>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn dfs(&mut self, s: &[f64], running: f64) {
        // an equal bound found later is never lexicographically first
        if running >= self.best {
            return;
        }
        let n = self.batch.len();
        if self.order.len() == n {
            self.best = running;
            self.best_order = self.order.clone();
            return;
        }
        let mut next = vec![0.0; self.d];
        for i in 0..n {
            if self.used[i] {
                continue;
            }
            next.copy_from_slice(s);
            add(&mut next, &self.batch.vectors[i]);
            let r = running.max(norm(&next));
            self.used[i] = true;
            self.order.push(i);
            self.dfs(&next, r);
            self.order.pop();
            self.used[i] = false;
        }
    }
}

/// Greedy: after `v₀`, repeatedly append the unused vector giving the
/// shortest prefix sum (ties to the lowest index).
pub fn confine_greedy(batch: &VectorBatch) -> Result<ConfinementResult, SteinitzError> {
    let n = batch.len();
    if n == 0 {
        return Err(SteinitzError::Empty);
    }
    let mut s = batch.vectors[0].clone();
    let mut used = vec![false; n];
    used[0] = true;
    let mut ordering = vec![0];
    let mut trial = vec![0.0; batch.dim()];
    for _ in 1..n {
        let mut best = (f64::INFINITY, usize::MAX);
        for i in (0..n).filter(|&i| !used[i]) {
            trial.copy_from_slice(&s);
            add(&mut trial, &batch.vectors[i]);
            let r = norm(&trial);
            if r < best.0 {
                best = (r, i);
            }
        }
        used[best.1] = true;
        add(&mut s, &batch.vectors[best.1]);
        ordering.push(best.1);
    }
    Ok(ConfinementResult::new(batch, ordering))
}
