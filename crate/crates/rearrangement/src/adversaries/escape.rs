//! Escape functions and the sets a permutation cannot jumble.

use std::fmt;
use std::sync::{Arc, RwLock};

use super::AdversaryError;
use crate::rearrangers::SetSource;
use crate::series_core::{Perm, PermError};

/// A strictly increasing `g: ℕ → ℕ`.
#[derive(Clone)]
pub enum IncFn {
    /// `g(n) = mul·n + add` (saturating).
    Affine { mul: usize, add: usize },
    Custom { f: Arc<dyn Fn(usize) -> usize + Send + Sync>, name: String },
}

impl IncFn {
    pub fn affine(mul: usize, add: usize) -> Result<Self, AdversaryError> {
        if mul == 0 {
            return Err(AdversaryError::NotIncreasing { n: 0, value: add, next: add });
        }
        Ok(IncFn::Affine { mul, add })
    }

    pub fn custom(name: impl Into<String>, f: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        IncFn::Custom { f: Arc::new(f), name: name.into() }
    }

    pub fn eval(&self, n: usize) -> usize {
        match self {
            IncFn::Affine { mul, add } => n.saturating_mul(*mul).saturating_add(*add),
            IncFn::Custom { f, .. } => f(n),
        }
    }

    /// Iterates from 0: `0, g(0), g(g(0)), …`, stopping at saturation.
    pub fn orbit(&self, len: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(len);
        let mut a = 0usize;
        for _ in 0..len {
            out.push(a);
            let b = self.eval(a);
            if b <= a {
                break;
            }
            a = b;
        }
        out
    }

    pub fn describe(&self) -> String {
        match self {
            IncFn::Affine { mul, add } => format!("affine:mul={mul},add={add}"),
            IncFn::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for IncFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `f_p(n) = 1 + max(n, max{p⁻¹(z) : z ≤ max p[[0, n]]})`.
///
/// Everything at or below `n` is mapped below everything at or past `f_p(n)`.
#[derive(Clone)]
pub struct EscapeFunction {
    p: Perm,
}

pub fn escape_function(p: Perm) -> EscapeFunction {
    EscapeFunction { p }
}

impl EscapeFunction {
    pub fn eval(&self, n: usize) -> Result<usize, PermError> {
        let mut top = 0;
        for x in 0..=n {
            top = top.max(self.p.forward(x)?);
        }
        let mut m = n;
        for z in 0..=top {
            m = m.max(self.p.inverse(z)?);
        }
        Ok(m + 1)
    }

    /// Values on `[0, n)`, computed incrementally.
    pub fn table(&self, n: usize) -> Result<Vec<usize>, PermError> {
        let mut out = Vec::with_capacity(n);
        let (mut top, mut scanned, mut m) = (0usize, 0usize, 0usize);
        for k in 0..n {
            top = top.max(self.p.forward(k)?);
            while scanned <= top {
                m = m.max(self.p.inverse(scanned)?);
                scanned += 1;
            }
            out.push(m.max(k) + 1);
        }
        Ok(out)
    }
}

/// `A = {a₀ = 0, a₁ = g(a₀), a₂ = g(a₁), …}`.
pub struct PreservedSet {
    g: IncFn,
    elems: RwLock<Vec<usize>>,
}

/// The set built by iterating `g` from 0. Permutations whose escape function
/// is eventually at most `g` preserve it.
pub fn preserved_set(g: IncFn) -> Result<PreservedSet, AdversaryError> {
    // check the first steps eagerly so bad input fails here
    let mut a = 0usize;
    for n in 0..64 {
        let b = g.eval(a);
        if b == usize::MAX {
            break;
        }
        if b <= a {
            return Err(AdversaryError::NotIncreasing { n, value: a, next: b });
        }
        a = b;
    }
    Ok(PreservedSet { g, elems: RwLock::new(vec![0]) })
}

impl PreservedSet {
    /// Extends until the last element exceeds `covers` and more than `count`
    /// elements exist.
    fn extend(&self, covers: usize, count: usize) {
        {
            let e = self.elems.read().unwrap();
            if *e.last().unwrap() > covers && e.len() > count {
                return;
            }
        }
        let mut e = self.elems.write().unwrap();
        loop {
            let last = *e.last().unwrap();
            if (last > covers && e.len() > count) || last == usize::MAX {
                return;
            }
            let next = self.g.eval(last);
            assert!(next > last, "g is not increasing at {last}");
            e.push(next);
        }
    }

    /// `a_k`
    pub fn element(&self, k: usize) -> usize {
        self.extend(0, k);
        self.elems.read().unwrap()[k]
    }

    pub fn elements_below(&self, n: usize) -> Vec<usize> {
        self.extend(n, 0);
        self.elems.read().unwrap().iter().copied().take_while(|&a| a < n).collect()
    }
}

impl SetSource for PreservedSet {
    fn contains(&self, n: usize) -> bool {
        self.extend(n, 0);
        self.elems.read().unwrap().binary_search(&n).is_ok()
    }
    fn rank(&self, n: usize) -> usize {
        self.extend(n, 0);
        self.elems.read().unwrap().partition_point(|&a| a < n)
    }
    fn nth(&self, k: usize) -> usize {
        self.element(k)
    }
    fn describe(&self) -> String {
        format!("orbit({})", self.g.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::{flip_permutation, IntervalPartition};
    use crate::series_core::Identity;

    #[test]
    fn identity_escapes_at_successor() {
        let f = escape_function(Arc::new(Identity));
        for n in 0..50 {
            assert_eq!(f.eval(n).unwrap(), n + 1);
        }
    }

    #[test]
    fn pair_flip_escape() {
        let f = escape_function(Arc::new(flip_permutation(IntervalPartition::uniform(2).unwrap())));
        assert_eq!(f.eval(0).unwrap(), 2);
        assert_eq!(f.table(20).unwrap(), (0..20).map(|n| f.eval(n).unwrap()).collect::<Vec<_>>());
    }

    #[test]
    fn orbits() {
        let a = preserved_set(IncFn::affine(2, 2).unwrap()).unwrap();
        assert_eq!(a.elements_below(40), vec![0, 2, 6, 14, 30]);
        assert_eq!(a.nth(5), 62);
        assert!(a.contains(14) && !a.contains(15));
        assert_eq!(a.rank(15), 4);
        let n = preserved_set(IncFn::affine(1, 1).unwrap()).unwrap();
        assert!((0..100).all(|x| n.contains(x)));
        assert!(preserved_set(IncFn::custom("const", |_| 3)).is_err());
    }
}
