use std::f64::consts::LN_2;
use std::sync::Arc;

use proptest::prelude::*;

use rearrangement::adversaries::*;
use rearrangement::rearrangers::{riemann_to_target, SetSource};
use rearrangement::{check_invariants, compensated, Identity, Perm, Permutation, Sampling, TermSource, Tolerances, Verdict};

fn flips(count: u64) -> Vec<Perm> {
    (0..count)
        .map(|s| Arc::new(flip_permutation(IntervalPartition::random(s, 2 + 5 * s as usize).unwrap())) as Perm)
        .collect()
}

#[test]
fn padding_survives_a_flip_family() {
    let perms = flips(10);
    let base = TermSource::AltHarmonic;
    let (sched, padded) = pad_against(perms.clone(), &base);
    assert!(order_violations(&perms, &sched, 1000).unwrap().is_empty());

    let count = 1000;
    let last = sched.l(count - 1).unwrap();
    let identity = compensated((0..=last).map(|n| padded.scalar(n).unwrap()));
    let direct = compensated((0..count).map(|k| base.scalar(k).unwrap()));
    assert!((identity - direct).abs() < 1e-12);
    for p in &perms {
        let h = matched_horizon(p.as_ref(), &sched, count).unwrap();
        let s = compensated((0..h).map(|n| padded.scalar(p.forward(n).unwrap()).unwrap()));
        assert!((s - identity).abs() < 1e-4, "{} vs {identity}", s);
    }
}

#[test]
fn triple_block_flip_jumbles_the_orbit() {
    let a: Arc<PreservedSet> = Arc::new(preserved_set(IncFn::affine(2, 2).unwrap()).unwrap());
    let j = IntervalPartition::from_set(a.clone(), 3).unwrap();
    assert_eq!(j.interval(1), (14, 126));
    let p = flip_permutation(j);
    let r = jumble_test(&p, a.as_ref(), 100_000).unwrap();
    let counts: Vec<u64> = r.checkpoints.iter().map(|c| c.1).collect();
    assert_eq!(counts, vec![3, 6, 9, 12, 15]);
    assert_eq!(r.verdict, JumbleVerdict::Jumbled);
}

#[test]
fn slow_escape_preserves_the_orbit() {
    let g = IncFn::affine(2, 2).unwrap();
    let a = preserved_set(g.clone()).unwrap();
    // pair flip: f(n) ≤ n + 2 ≤ 2n + 2
    let p: Perm = Arc::new(flip_permutation(IntervalPartition::uniform(2).unwrap()));
    let f = escape_function(p.clone()).table(1000).unwrap();
    assert!(f.iter().enumerate().all(|(n, &v)| v <= g.eval(n)));
    let r = jumble_test(p.as_ref(), &a, 10_000).unwrap();
    assert_eq!(r.reversals, 0);
    let r = jumble_test(&Identity, &a, 10_000).unwrap();
    assert_eq!(r.reversals, 0);
}

#[test]
fn escape_function_separates() {
    for p in flips(5) {
        let f = escape_function(p.clone()).table(300).unwrap();
        for (n, &fnv) in f.iter().enumerate() {
            assert!(fnv > n);
            let below = (0..=n).map(|x| p.forward(x).unwrap()).max().unwrap();
            let above = (fnv..1000).map(|y| p.forward(y).unwrap()).min().unwrap();
            assert!(below < above, "n={n}");
        }
    }
}

#[test]
fn mixing_oscillates_between_limits() {
    let src = TermSource::AltHarmonic;
    let p: Perm = riemann_to_target(&src, 0.0, &[]).unwrap();
    let sampling = Sampling::Geometric { dense: 100, per_decade: 5 };
    let e = mix_experiment(&src, p.clone(), 1_000_000, &sampling, &Tolerances::default()).unwrap();
    assert!(e.verified);
    let late: Vec<f64> = e.trajectory.indices.iter().zip(&e.trajectory.sums).filter(|(i, _)| **i > 1000).map(|(_, s)| s[0]).collect();
    assert!(late.iter().any(|s| s.abs() < 1e-2));
    assert!(late.iter().any(|s| (s - LN_2).abs() < 1e-2));
    assert!(matches!(e.verdict, Verdict::Oscillates { .. }), "{:?}", e.verdict);
    let g = mix(p);
    assert!(check_invariants(g.as_ref(), 20_000).ok());
}

#[test]
fn dominance_by_triple_blocks() {
    let a: Arc<dyn SetSource> = Arc::new(preserved_set(IncFn::affine(2, 2).unwrap()).unwrap());
    let j = IntervalPartition::from_set(a.clone(), 3).unwrap();
    let i = IntervalPartition::from_set(a, 1).unwrap();
    let r = dominates(&j, &i, 1 << 30);
    assert!(r.failures.is_empty());
    assert!(r.checked >= 9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flips_are_involutions(seed in any::<u64>(), max in 1usize..20) {
        let p = flip_permutation(IntervalPartition::random(seed, max).unwrap());
        for n in 0..2000 {
            let m = p.forward(n).unwrap();
            prop_assert_eq!(p.forward(m).unwrap(), n);
        }
    }
}
