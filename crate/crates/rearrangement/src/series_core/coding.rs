//! Coding permutations as integer sequences by back-and-forth enumeration.
//!
//! Round `k` pairs an argument `a_k` with a value `b_k`. On even rounds `a_k`
//! is the least argument not yet paired and `c_k` is the position of
//! `b_k = p(a_k)` among the values not yet paired; on odd rounds `b_k` is the
//! least unpaired value and `c_k` is the position of `a_k = p^{-1}(b_k)` among
//! the unpaired arguments.

use std::collections::BTreeSet;

use super::{PartialMap, PermError, Permutation};

/// Position of `x` among the naturals missing from `used` (`x` itself unused).
fn position_among_unused(used: &BTreeSet<usize>, x: usize) -> usize {
    x - used.range(..x).count()
}

fn least_unused(used: &BTreeSet<usize>) -> usize {
    let mut x = 0;
    for &u in used {
        if u != x {
            break;
        }
        x += 1;
    }
    x
}

fn nth_unused(used: &BTreeSet<usize>, k: usize) -> usize {
    let mut x = k;
    for &u in used {
        if u <= x {
            x += 1;
        } else {
            break;
        }
    }
    x
}

/// The first `k` codes of `p`.
pub fn encode_permutation(p: &dyn Permutation, k: usize) -> Result<Vec<usize>, PermError> {
    let mut args = BTreeSet::new();
    let mut vals = BTreeSet::new();
    let mut code = Vec::with_capacity(k);
    for round in 0..k {
        let (a, b, c) = if round % 2 == 0 {
            let a = least_unused(&args);
            let b = p.forward(a)?;
            (a, b, position_among_unused(&vals, b))
        } else {
            let b = least_unused(&vals);
            let a = p.inverse(b)?;
            (a, b, position_among_unused(&args, a))
        };
        args.insert(a);
        vals.insert(b);
        code.push(c);
    }
    Ok(code)
}

/// The pairs `(a_k, b_k)` a code determines.
pub fn decode_pairs(code: &[usize]) -> Vec<(usize, usize)> {
    let mut args = BTreeSet::new();
    let mut vals = BTreeSet::new();
    let mut pairs = Vec::with_capacity(code.len());
    for (round, &c) in code.iter().enumerate() {
        let (a, b) = if round % 2 == 0 {
            (least_unused(&args), nth_unused(&vals, c))
        } else {
            (nth_unused(&args, c), least_unused(&vals))
        };
        args.insert(a);
        vals.insert(b);
        pairs.push((a, b));
    }
    pairs
}

/// Decode into a permutation: the decoded pairs, completed by the
/// order-preserving bijection between unpaired arguments and unpaired values.
pub fn decode_permutation(code: &[usize]) -> PartialMap {
    PartialMap::new(decode_pairs(code)).expect("decoded pairs are injective by construction")
}
