//! Heuristic search for coefficient directions `s` along which `Σ ⟨s, aₙ⟩`
//! converges absolutely. Such directions cannot be moved by rearranging, so
//! a steering target off that subspace may be unreachable.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::series_core::{SeriesError, TermSource};

/// A direction counts as bounded when its absolute series grows by less
/// than this over the final decade.
pub const DEFAULT_GROWTH_TOL: f64 = 0.1;

const DIRECTION_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelVerdict {
    Independent,
    DependentDirectionFound { direction: Vec<f64> },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDiagnostic {
    pub horizon: usize,
    pub directions: Vec<Vec<f64>>,
    /// `Σ_{n<N} |⟨s, aₙ⟩|` at each checkpoint, per direction.
    pub checkpoints: Vec<usize>,
    pub growth: Vec<Vec<f64>>,
    /// Increase over the final decade, per direction.
    pub final_decade: Vec<f64>,
    pub tol: f64,
    pub verdict: KernelVerdict,
}

/// Unit directions to test: the least-variance direction of the last decade's
/// terms, the axes, pairwise diagonals, then seeded Gaussian samples.
fn directions(d: usize, count: usize, least: Option<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = least.into_iter().collect();
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        out.push(e);
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i + 1..d {
            for sgn in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[i] = h;
                e[j] = sgn * h;
                out.push(e);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DIRECTION_SEED);
    while out.len() < count {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-9 {
            out.push(v.into_iter().map(|x| x / r).collect());
        }
    }
    out.truncate(count.max(d));
    out
}

pub fn kernel_diagnostic(source: &TermSource, horizon: usize, count: usize) -> Result<KernelDiagnostic, SeriesError> {
    kernel_diagnostic_with(source, horizon, count, DEFAULT_GROWTH_TOL)
}

pub fn kernel_diagnostic_with(
    source: &TermSource,
    horizon: usize,
    count: usize,
    tol: f64,
) -> Result<KernelDiagnostic, SeriesError> {
    let d = source.dim();
    if count < 2 * d {
        return Err(SeriesError::InvalidParameter(format!("need at least {} directions, got {count}", 2 * d)));
    }
    if horizon < 100 {
        return Err(SeriesError::InvalidParameter(format!("horizon {horizon} too short for a decade comparison")));
    }
    let decade = horizon / 10;
    let mut terms = vec![0.0; horizon * d];
    for n in 0..horizon {
        source.term_into(n, &mut terms[n * d..(n + 1) * d])?;
    }
    // second moments of the final decade, each term normalised
    let mut m = DMatrix::<f64>::zeros(d, d);
    for n in decade..horizon {
        let t = &terms[n * d..(n + 1) * d];
        let r2: f64 = t.iter().map(|x| x * x).sum();
        if r2 > 0.0 {
            for a in 0..d {
                for b in 0..d {
                    m[(a, b)] += t[a] * t[b] / r2;
                }
            }
        }
    }
    let least = (d > 1).then(|| {
        let eig = m.symmetric_eigen();
        let k = (0..d).min_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q])).unwrap();
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        // fix the sign: first nonzero coordinate positive
        if v.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    });
    let dirs = directions(d, count, least);

    let mut checkpoints = Vec::new();
    let mut c = 10;
    while c < horizon {
        checkpoints.push(c);
        c *= 10;
    }
    checkpoints.push(decade);
    checkpoints.push(horizon);
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let mut growth = Vec::with_capacity(dirs.len());
    let mut final_decade = Vec::with_capacity(dirs.len());
    for s in &dirs {
        let mut acc = crate::series_core::CompensatedSum::new();
        let mut at = Vec::with_capacity(checkpoints.len());
        let mut ci = 0;
        let mut at_decade = 0.0;
        for n in 0..horizon {
            let t = &terms[n * d..(n + 1) * d];
            acc.add(s.iter().zip(t).map(|(a, b)| a * b).sum::<f64>().abs());
            if n + 1 == decade {
                at_decade = acc.value();
            }
            while ci < checkpoints.len() && checkpoints[ci] == n + 1 {
                at.push(acc.value());
                ci += 1;
            }
        }
        final_decade.push(acc.value() - at_decade);
        growth.push(at);
    }

    let bounded: Vec<usize> = (0..dirs.len()).filter(|&i| final_decade[i] < tol).collect();
    let verdict = if bounded.is_empty() {
        KernelVerdict::Independent
    } else if bounded.len() == dirs.len() {
        KernelVerdict::Undetermined { reason: "no sampled direction grows; the series may converge absolutely".into() }
    } else {
        let i = *bounded.iter().min_by(|&&a, &&b| final_decade[a].total_cmp(&final_decade[b])).unwrap();
        KernelVerdict::DependentDirectionFound { direction: dirs[i].clone() }
    };
    Ok(KernelDiagnostic { horizon, directions: dirs, checkpoints, growth, final_decade, tol, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_coordinates_are_dependent() {
        let s = TermSource::stack(vec![TermSource::AltHarmonic, TermSource::AltHarmonic]).unwrap();
        let k = kernel_diagnostic(&s, 10_000, 8).unwrap();
        match k.verdict {
            KernelVerdict::DependentDirectionFound { direction } => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                assert!((direction[0] - h).abs() < 1e-9 && (direction[1] + h).abs() < 1e-9, "{direction:?}");
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn harmonic_is_independent() {
        let k = kernel_diagnostic(&TermSource::AltHarmonic, 10_000, 2).unwrap();
        assert_eq!(k.verdict, KernelVerdict::Independent);
        // Σ 1/n over a decade ≈ ln 10
        assert!((k.final_decade[0] - 10f64.ln()).abs() < 1e-3);
    }

    #[test]
    fn absolutely_convergent_is_undetermined() {
        let k = kernel_diagnostic(&TermSource::power(2.0).unwrap(), 10_000, 2).unwrap();
        assert!(matches!(k.verdict, KernelVerdict::Undetermined { .. }));
    }

    #[test]
    fn too_few_directions() {
        let s = TermSource::stack(vec![TermSource::AltHarmonic, TermSource::Harmonic]).unwrap();
        assert!(kernel_diagnostic(&s, 1000, 3).is_err());
    }
}
