//! Fractional selection of candidate terms and its rounding.
//!
//! Problem: minimise `Σ cᵢ xᵢ` subject to `Σ xᵢ vᵢ = g`, `0 ≤ xᵢ ≤ 1`.
//! The entropy-smoothed dual is solved by damped Newton, then the fractional
//! solution is rounded by Carathéodory steps, which leave at most `d`
//! fractional coordinates and move `Σ xᵢ vᵢ` by at most `d` candidate norms.

use nalgebra::{DMatrix, DVector};

const NEWTON_ITERS: usize = 40;
const EPS: f64 = 1e-12;

/// Temperatures for a cold start and for warm-started stages.
pub(crate) const COLD: &[f64] = &[1.0, 0.5, 0.25, 0.1, 0.05, 0.02];
pub(crate) const WARM: &[f64] = &[0.02];

#[inline]
fn softplus(z: f64) -> f64 {
    if z > 30.0 {
        z
    } else if z < -30.0 {
        z.exp()
    } else {
        z.exp().ln_1p()
    }
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z > 40.0 {
        1.0
    } else if z < -40.0 {
        0.0
    } else {
        1.0 / (1.0 + (-z).exp())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Problem<'a> {
    d: usize,
    v: &'a [f64],
    cost: &'a [f64],
    g: &'a [f64],
}

impl Problem<'_> {
    fn n(&self) -> usize {
        self.cost.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.v[i * self.d..(i + 1) * self.d]
    }

    fn objective(&self, lam: &[f64], tau: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n() {
            s += tau * softplus((dot(self.row(i), lam) - self.cost[i]) / tau);
        }
        s - dot(lam, self.g)
    }

    fn grad_hess(&self, lam: &[f64], tau: f64) -> (Vec<f64>, DMatrix<f64>) {
        let d = self.d;
        let mut grad: Vec<f64> = self.g.iter().map(|y| -y).collect();
        let mut h = DMatrix::<f64>::zeros(d, d);
        for i in 0..self.n() {
            let x = self.row(i);
            let z = (dot(x, lam) - self.cost[i]) / tau;
            let s = sigmoid(z);
            if s == 0.0 {
                continue;
            }
            let w = s * (1.0 - s) / tau;
            for a in 0..d {
                grad[a] += s * x[a];
                if w > 0.0 {
                    for b in 0..d {
                        h[(a, b)] += w * x[a] * x[b];
                    }
                }
            }
        }
        (grad, h)
    }
}

/// Chooses a subset of candidates whose sum is close to `g` at low cost.
///
/// `v` holds `n × d` coordinates; `lambda` is the dual warm start, updated
/// in place.
pub(crate) fn select(d: usize, v: &[f64], cost: &[f64], g: &[f64], lambda: &mut [f64], taus: &[f64]) -> Vec<bool> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // rescale so the largest coordinate is 1
    let sc = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let sc = if sc > 0.0 { sc } else { 1.0 };
    let vs: Vec<f64> = v.iter().map(|x| x / sc).collect();
    let gs: Vec<f64> = g.iter().map(|x| x / sc).collect();
    let prob = Problem { d, v: &vs, cost, g: &gs };
    let gnorm = dot(&gs, &gs).sqrt();
    let mut lam: Vec<f64> = lambda.iter().map(|l| l * sc).collect();

    let mut tau = taus.last().copied().unwrap_or(0.02);
    for &t in taus {
        tau = t;
        for _ in 0..NEWTON_ITERS {
            let (grad, mut h) = prob.grad_hess(&lam, tau);
            if dot(&grad, &grad).sqrt() < 1e-7 * (1.0 + gnorm) {
                break;
            }
            let tr: f64 = (0..d).map(|i| h[(i, i)]).sum();
            for i in 0..d {
                h[(i, i)] += 1e-10 * tr + 1e-300;
            }
            let gv = DVector::from_column_slice(&grad);
            let step = h.lu().solve(&gv).unwrap_or(gv);
            let f0 = prob.objective(&lam, tau);
            let dec = dot(&grad, step.as_slice());
            let mut t = 1.0;
            loop {
                let cand: Vec<f64> = lam.iter().zip(step.iter()).map(|(l, s)| l - t * s).collect();
                if prob.objective(&cand, tau) <= f0 - 1e-4 * t * dec || t < 1e-12 {
                    lam = cand;
                    break;
                }
                t *= 0.5;
            }
        }
    }
    for (o, l) in lambda.iter_mut().zip(&lam) {
        *o = l / sc;
    }
    let mut x: Vec<f64> = (0..n).map(|i| sigmoid((dot(prob.row(i), &lam) - cost[i]) / tau)).collect();
    round(&prob, &mut x);
    x.iter().map(|&xi| xi > 0.5).collect()
}

/// Carathéodory rounding: repeatedly take `d + 1` fractional coordinates,
/// move along a null direction of their vectors until one hits 0 or 1.
fn round(prob: &Problem, x: &mut [f64]) {
    let d = prob.d;
    for xi in x.iter_mut() {
        if *xi <= EPS {
            *xi = 0.0;
        } else if *xi >= 1.0 - EPS {
            *xi = 1.0;
        }
    }
    let frac = |xi: f64| xi > 0.0 && xi < 1.0;
    let mut queue: Vec<usize> = (0..x.len()).filter(|&i| frac(x[i])).collect();
    // large vectors first, so the leftovers are small ones
    let norm2 = |i: usize| dot(prob.row(i), prob.row(i));
    queue.sort_by(|&a, &b| norm2(b).total_cmp(&norm2(a)).then(a.cmp(&b)));
    let mut pending = queue.into_iter();
    let mut work: Vec<usize> = Vec::with_capacity(d + 1);
    loop {
        while work.len() < d + 1 {
            match pending.next() {
                Some(i) if frac(x[i]) => work.push(i),
                Some(_) => {}
                None => break,
            }
        }
        if work.len() < d + 1 {
            break;
        }
        let a = DMatrix::from_fn(d, d + 1, |r, c| prob.row(work[c])[r]);
        let eig = (a.transpose() * &a).symmetric_eigen();
        let k = (0..eig.eigenvalues.len()).min_by(|&p, &q| eig.eigenvalues[p].abs().total_cmp(&eig.eigenvalues[q].abs())).unwrap();
        let y = eig.eigenvectors.column(k).clone_owned();
        let mut t = f64::INFINITY;
        for (j, &i) in work.iter().enumerate() {
            if y[j] > 0.0 {
                t = t.min((1.0 - x[i]) / y[j]);
            } else if y[j] < 0.0 {
                t = t.min(-x[i] / y[j]);
            }
        }
        let mut fixed = false;
        for (j, &i) in work.iter().enumerate() {
            x[i] += t * y[j];
            if x[i] <= EPS {
                x[i] = 0.0;
                fixed = true;
            } else if x[i] >= 1.0 - EPS {
                x[i] = 1.0;
                fixed = true;
            }
        }
        if !fixed {
            // numerically stuck: round the coordinate nearest to an end
            let j = (0..=d)
                .min_by(|&p, &q| {
                    let ep = x[work[p]].min(1.0 - x[work[p]]);
                    let eq = x[work[q]].min(1.0 - x[work[q]]);
                    ep.total_cmp(&eq)
                })
                .unwrap();
            x[work[j]] = x[work[j]].round();
        }
        work.retain(|&i| frac(x[i]));
    }
}
