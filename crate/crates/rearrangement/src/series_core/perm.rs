//! Lazy bijections of the naturals.
//!
//! Every generator answers both directions and can bound where a value first
//! appears, so bijectivity is something tests can check rather than assume.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use super::PermError;

pub trait Permutation: Send + Sync {
    fn forward(&self, n: usize) -> Result<usize, PermError>;
    fn inverse(&self, m: usize) -> Result<usize, PermError>;

    /// Some `N` with `m` in `forward[[0, N)]`.
    fn cover_bound(&self, m: usize) -> Result<usize, PermError> {
        Ok(self.inverse(m)? + 1)
    }

    /// `forward(0..n)` in order.
    fn prefix(&self, n: usize) -> Result<Vec<usize>, PermError> {
        (0..n).map(|i| self.forward(i)).collect()
    }

    fn describe(&self) -> String;
}

pub type Perm = Arc<dyn Permutation>;

#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl Permutation for Identity {
    fn forward(&self, n: usize) -> Result<usize, PermError> {
        Ok(n)
    }
    fn inverse(&self, m: usize) -> Result<usize, PermError> {
        Ok(m)
    }
    fn prefix(&self, n: usize) -> Result<Vec<usize>, PermError> {
        Ok((0..n).collect())
    }
    fn describe(&self) -> String {
        "identity".into()
    }
}

/// `p ∘ q`: first `q`, then `p`, i.e. `n ↦ p(q(n))`.
pub struct Compose {
    outer: Perm,
    inner: Perm,
}

impl Compose {
    pub fn new(outer: Perm, inner: Perm) -> Self {
        Compose { outer, inner }
    }
}

impl Permutation for Compose {
    fn forward(&self, n: usize) -> Result<usize, PermError> {
        self.outer.forward(self.inner.forward(n)?)
    }
    fn inverse(&self, m: usize) -> Result<usize, PermError> {
        self.inner.inverse(self.outer.inverse(m)?)
    }
    fn describe(&self) -> String {
        format!("compose({} ∘ {})", self.outer.describe(), self.inner.describe())
    }
}

/// A finite injective table completed order-preservingly: the k-th argument
/// outside the table goes to the k-th value outside its range. When the table
/// permutes `[0, K)` this is the identity beyond `K`.
#[derive(Clone, Debug)]
pub struct PartialMap {
    fwd: BTreeMap<usize, usize>,
    inv: BTreeMap<usize, usize>,
    dom: Vec<usize>,
    ran: Vec<usize>,
}

impl PartialMap {
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self, PermError> {
        let mut fwd = BTreeMap::new();
        let mut inv = BTreeMap::new();
        for (a, b) in pairs {
            if fwd.insert(a, b).is_some() {
                return Err(PermError::InvalidTable(format!("argument {a} listed twice")));
            }
            if let Some(prev) = inv.insert(b, a) {
                return Err(PermError::NotInjective { value: b, first: prev, second: a });
            }
        }
        let dom = fwd.keys().copied().collect();
        let ran = inv.keys().copied().collect();
        Ok(PartialMap { fwd, inv, dom, ran })
    }

    /// Table `i ↦ values[i]` on `[0, len)`.
    pub fn from_values(values: &[usize]) -> Result<Self, PermError> {
        Self::new(values.iter().copied().enumerate())
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.fwd.iter().map(|(a, b)| (*a, *b))
    }

    fn complement_rank(sorted: &[usize], x: usize) -> usize {
        x - sorted.partition_point(|&y| y < x)
    }

    /// The k-th natural number missing from `sorted`.
    fn complement_nth(sorted: &[usize], k: usize) -> usize {
        // answer is k + j where j = #{y in sorted : y <= answer}; sorted[i] - i
        // is nondecreasing, so j is a partition point
        let (mut lo, mut hi) = (0, sorted.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if sorted[mid] - mid <= k {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        k + lo
    }
}

impl Permutation for PartialMap {
    fn forward(&self, n: usize) -> Result<usize, PermError> {
        if let Some(&b) = self.fwd.get(&n) {
            return Ok(b);
        }
        Ok(Self::complement_nth(&self.ran, Self::complement_rank(&self.dom, n)))
    }
    fn inverse(&self, m: usize) -> Result<usize, PermError> {
        if let Some(&a) = self.inv.get(&m) {
            return Ok(a);
        }
        Ok(Self::complement_nth(&self.dom, Self::complement_rank(&self.ran, m)))
    }
    fn describe(&self) -> String {
        let shown: Vec<String> = self.fwd.iter().take(8).map(|(a, b)| format!("{a}->{b}")).collect();
        let more = if self.fwd.len() > 8 { ",..." } else { "" };
        format!("table[{}{}]", shown.join(","), more)
    }
}

/// A generator that produces `forward(0), forward(1), ...` one at a time.
pub trait Emitter: Send + Sync {
    fn next_value(&mut self) -> Result<usize, PermError>;
    fn describe(&self) -> String;
}

struct SeqState<E> {
    emitter: E,
    fwd: Vec<usize>,
    inv: Vec<usize>,
    failed: Option<PermError>,
}

const UNSEEN: usize = usize::MAX;

/// Memoizing wrapper that turns an [`Emitter`] into a [`Permutation`].
///
/// Readers share the memo tables; extension takes the write lock. Emitters
/// are deterministic, so whichever thread extends writes the same values.
/// A repeated value is reported as [`PermError::NotInjective`].
pub struct Sequential<E> {
    state: RwLock<SeqState<E>>,
    search_limit: usize,
}

/// Default cap on how far `inverse` extends a sequential generator.
pub const DEFAULT_SEARCH_LIMIT: usize = 1 << 28;

impl<E: Emitter> Sequential<E> {
    pub fn new(emitter: E) -> Self {
        Self::with_limit(emitter, DEFAULT_SEARCH_LIMIT)
    }

    pub fn with_limit(emitter: E, search_limit: usize) -> Self {
        Sequential { state: RwLock::new(SeqState { emitter, fwd: Vec::new(), inv: Vec::new(), failed: None }), search_limit }
    }

    /// Number of values generated so far.
    pub fn generated(&self) -> usize {
        self.state.read().unwrap().fwd.len()
    }

    /// Read access to the emitter (e.g. for checkpoints it records).
    pub fn with_emitter<R>(&self, f: impl FnOnce(&E) -> R) -> R {
        f(&self.state.read().unwrap().emitter)
    }

    /// Extend until `done(emitter, generated)` holds or the search limit hits.
    pub fn extend_while(&self, mut more: impl FnMut(&E, usize) -> bool) -> Result<(), PermError> {
        let mut st = self.state.write().unwrap();
        while more(&st.emitter, st.fwd.len()) {
            if st.fwd.len() >= self.search_limit {
                return Err(PermError::SearchLimit { limit: self.search_limit });
            }
            Self::step(&mut st)?;
        }
        Ok(())
    }

    fn step(st: &mut SeqState<E>) -> Result<(), PermError> {
        if let Some(e) = &st.failed {
            return Err(e.clone());
        }
        let v = match st.emitter.next_value() {
            Ok(v) => v,
            Err(e) => {
                st.failed = Some(e.clone());
                return Err(e);
            }
        };
        if v >= st.inv.len() {
            let grow = (v + 1).max(st.inv.len() * 2);
            st.inv.resize(grow, UNSEEN);
        }
        if st.inv[v] != UNSEEN {
            let e = PermError::NotInjective { value: v, first: st.inv[v], second: st.fwd.len() };
            st.failed = Some(e.clone());
            return Err(e);
        }
        st.inv[v] = st.fwd.len();
        st.fwd.push(v);
        Ok(())
    }

    fn extend_to(&self, n: usize) -> Result<(), PermError> {
        let mut st = self.state.write().unwrap();
        while st.fwd.len() <= n {
            Self::step(&mut st)?;
        }
        Ok(())
    }
}

impl<E: Emitter> Permutation for Sequential<E> {
    fn forward(&self, n: usize) -> Result<usize, PermError> {
        {
            let st = self.state.read().unwrap();
            if n < st.fwd.len() {
                return Ok(st.fwd[n]);
            }
        }
        self.extend_to(n)?;
        Ok(self.state.read().unwrap().fwd[n])
    }

    fn inverse(&self, m: usize) -> Result<usize, PermError> {
        {
            let st = self.state.read().unwrap();
            if m < st.inv.len() && st.inv[m] != UNSEEN {
                return Ok(st.inv[m]);
            }
        }
        let mut st = self.state.write().unwrap();
        loop {
            if m < st.inv.len() && st.inv[m] != UNSEEN {
                return Ok(st.inv[m]);
            }
            if st.fwd.len() >= self.search_limit {
                return Err(PermError::SearchLimit { limit: self.search_limit });
            }
            Self::step(&mut st)?;
        }
    }

    fn prefix(&self, n: usize) -> Result<Vec<usize>, PermError> {
        if n > 0 {
            self.extend_to(n - 1)?;
        }
        Ok(self.state.read().unwrap().fwd[..n].to_vec())
    }

    fn describe(&self) -> String {
        self.state.read().unwrap().emitter.describe()
    }
}

/// Outcome of [`check_invariants`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check injectivity of `forward` on `[0, n)`, `inverse ∘ forward = id` there,
/// `forward ∘ inverse = id` on `[0, n)`, and that `cover_bound` is honest.
pub fn check_invariants(p: &dyn Permutation, n: usize) -> InvariantReport {
    let mut failures = Vec::new();
    let fwd = match p.prefix(n) {
        Ok(v) => v,
        Err(e) => return InvariantReport { checked: 0, failures: vec![format!("forward failed: {e}")] },
    };
    let mut seen = std::collections::HashMap::with_capacity(n);
    for (i, &v) in fwd.iter().enumerate() {
        if let Some(j) = seen.insert(v, i) {
            failures.push(format!("forward({j}) = forward({i}) = {v}"));
        }
        match p.inverse(v) {
            Ok(k) if k == i => {}
            Ok(k) => failures.push(format!("inverse(forward({i})) = {k}")),
            Err(e) => failures.push(format!("inverse({v}) failed: {e}")),
        }
        if failures.len() > 20 {
            break;
        }
    }
    for m in 0..n {
        if failures.len() > 20 {
            break;
        }
        match p.inverse(m).and_then(|k| Ok((k, p.forward(k)?))) {
            Ok((_, v)) if v == m => {}
            Ok((k, v)) => failures.push(format!("forward(inverse({m})) = forward({k}) = {v}")),
            Err(e) => failures.push(format!("inverse({m}) failed: {e}")),
        }
        match p.cover_bound(m) {
            Ok(b) => match p.inverse(m) {
                Ok(k) if k < b => {}
                Ok(k) => failures.push(format!("cover_bound({m}) = {b} but inverse is {k}")),
                Err(_) => {}
            },
            Err(e) => failures.push(format!("cover_bound({m}) failed: {e}")),
        }
    }
    InvariantReport { checked: n, failures }
}
