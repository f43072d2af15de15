use std::f64::consts::LN_2;

use rearrangement::steinitz::{levy_steinitz_rearrange, SteerConfig};
use rearrangement::{check_invariants, compensated, TermSource};

/// Σ (−1)ⁿ (n+1)^{−0.6}, from the mean of consecutive partial sums at 10⁷.
fn eta_06() -> f64 {
    let n = 10_000_000;
    let s = compensated((0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * ((k + 1) as f64).powf(-0.6)));
    // the next term is positive since n is even
    s + 0.5 * ((n + 1) as f64).powf(-0.6)
}

#[test]
fn shifted_pair_is_reached() {
    let eta = eta_06();
    assert!((eta - 0.623890779768824).abs() < 1e-8, "{eta}");
    let src = TermSource::stack(vec![TermSource::AltHarmonic, TermSource::alt_power(0.6).unwrap()]).unwrap();
    let t = std::time::Instant::now();
    let s = levy_steinitz_rearrange(&src, &[LN_2 + 0.1, eta - 0.1], &[], 100_000, &SteerConfig::default()).unwrap();
    eprintln!("{:?} in {:?}", s.report, t.elapsed());
    assert!(s.report.final_error <= 1e-2);
    assert!(check_invariants(&s.perm, 200_000).ok());
}
