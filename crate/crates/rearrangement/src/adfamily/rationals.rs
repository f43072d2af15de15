//! A fixed bijection between ℕ and ℚ.
//!
//! `0 ↦ 0`; then for `s = 2, 3, …` and `p = 1, …, s−1` with `gcd(p, s) = 1`,
//! the fraction `p/(s−p)` followed by `−p/(s−p)`. So `1 ↦ 1`, `2 ↦ −1`,
//! `3 ↦ 1/2`, `4 ↦ −1/2`, `5 ↦ 2`, `6 ↦ −2`, `7 ↦ 1/3`, …

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// A reduced fraction `num/den`, `den ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: u64,
}

impl Rational {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = (num.unsigned_abs()).gcd(&den);
        let g = g.max(1);
        Rational { num: num / g as i64, den: den / g }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Totient tables for the enumeration, grown on demand.
#[derive(Default)]
pub struct RationalIndex {
    phi: Vec<u64>,
    /// `cum[s] = 1 + 2·Σ_{t=2}^{s−1} φ(t)`: index of the first fraction with sum `s`.
    cum: Vec<u64>,
}

impl RationalIndex {
    pub fn new() -> Self {
        Self::default()
    }

    fn grow(&mut self, s: usize) {
        if self.phi.len() > s {
            return;
        }
        let n = (s + 1).max(2 * self.phi.len()).max(16);
        let mut phi: Vec<u64> = (0..n as u64).collect();
        for i in 2..n {
            if phi[i] == i as u64 {
                let mut j = i;
                while j < n {
                    phi[j] -= phi[j] / i as u64;
                    j += i;
                }
            }
        }
        let mut cum = vec![0u64; n];
        if n > 2 {
            cum[2] = 1;
        }
        for t in 3..n {
            cum[t] = cum[t - 1] + 2 * phi[t - 1];
        }
        self.phi = phi;
        self.cum = cum;
    }

    fn prime_factors(mut s: u64) -> Vec<u64> {
        let mut f = Vec::new();
        let mut d = 2;
        while d * d <= s {
            if s % d == 0 {
                f.push(d);
                while s % d == 0 {
                    s /= d;
                }
            }
            d += 1;
        }
        if s > 1 {
            f.push(s);
        }
        f
    }

    /// `#{1 ≤ p' < p : gcd(p', s) = 1}` by inclusion–exclusion.
    fn coprime_below(p: u64, s: u64) -> u64 {
        let f = Self::prime_factors(s);
        let m = p - 1;
        let mut total: i64 = 0;
        for mask in 0u32..(1 << f.len()) {
            let mut d = 1u64;
            for (k, q) in f.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    d *= q;
                }
            }
            let term = (m / d) as i64;
            total += if mask.count_ones() % 2 == 0 { term } else { -term };
        }
        total as u64
    }

    pub fn index_of(&mut self, r: Rational) -> u64 {
        if r.num == 0 {
            return 0;
        }
        let p = r.num.unsigned_abs();
        let s = p + r.den;
        self.grow(s as usize);
        self.cum[s as usize] + 2 * Self::coprime_below(p, s) + u64::from(r.num < 0)
    }

    pub fn rational_at(&mut self, index: u64) -> Rational {
        if index == 0 {
            return Rational { num: 0, den: 1 };
        }
        // sum s: last s with cum[s] ≤ index
        loop {
            let top = *self.cum.last().unwrap_or(&0);
            if top > index {
                break;
            }
            let n = (self.phi.len() * 2).max(16);
            self.grow(n);
        }
        let s = self.cum.partition_point(|&c| c <= index) - 1;
        let within = index - self.cum[s];
        let k = within / 2;
        // the k-th p coprime to s
        let p = (1..s as u64).filter(|p| p.gcd(&(s as u64)) == 1).nth(k as usize).expect("index within sum block");
        let num = p as i64;
        Rational { num: if within % 2 == 1 { -num } else { num }, den: s as u64 - p }
    }
}
