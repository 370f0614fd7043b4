use proptest::prelude::*;

use super::*;
use crate::measures::{parry_measure, LoopMarkov};
use crate::shift::{word, FiniteGraph, LoopSystem};

fn bernoulli_half() -> MarkovMeasure {
    FiniteMarkov::bernoulli(&[0.5, 0.5]).unwrap().into()
}

fn golden() -> MarkovMeasure {
    parry_measure(&FiniteGraph::from_edges(2, [(1, 1), (1, 2), (2, 1)])).unwrap().into()
}

#[test]
fn uniform_masses_need_strictly_more_than_the_target() {
    // 6 cylinders of mass 1/8 reach exactly 3/4, which is not strictly bigger
    assert_eq!(covering_number(&bernoulli_half(), 3, 0.25).unwrap(), 7);
    assert_eq!(covering_number(&bernoulli_half(), 3, 0.3).unwrap(), 6);
}

#[test]
fn fixed_points_need_one_cylinder() {
    let c: MarkovMeasure = FiniteMarkov::cycle(&[2]).unwrap().into();
    for n in 1..6 {
        for d in [0.1, 0.5, 0.9] {
            assert_eq!(covering_number(&c, n, d).unwrap(), 1);
        }
    }
}

#[test]
fn periodic_orbits_need_one_cylinder_per_point() {
    let c: MarkovMeasure = FiniteMarkov::cycle(&[1, 2, 3]).unwrap().into();
    for n in 1..6 {
        assert_eq!(covering_number(&c, n, 0.1).unwrap(), 3);
        assert_eq!(covering_number(&c, n, 0.5).unwrap(), 2);
        assert_eq!(covering_number(&c, n, 0.7).unwrap(), 1);
    }
}

#[test]
fn golden_mean_two_cylinders() {
    let m = golden();
    let f = m.to_finite(16).unwrap();
    let mut masses: Vec<f64> = [[1, 1], [1, 2], [2, 1]].iter().map(|w| f.cylinder_mass(&word(w))).collect();
    masses.sort_by(|a, b| b.total_cmp(a));
    let expected = if masses[0] > 0.9 {
        1
    } else if masses[0] + masses[1] > 0.9 {
        2
    } else {
        3
    };
    assert_eq!(covering_number(&m, 2, 0.1).unwrap(), expected);
}

#[test]
fn rates_match_entropy() {
    let b = katok_estimate(&bernoulli_half(), &[0.1, 0.4], 10, 20).unwrap();
    assert!(b.gaps.iter().all(|&g| g < 0.03), "{:?}", b.gaps);
    assert!(b.delta_spread < 0.02);
    let g = katok_estimate(&golden(), &[0.1, 0.4], 11, 22).unwrap();
    assert!(g.gaps.iter().all(|&x| x < 0.05), "{:?}", g.gaps);
    assert!(g.delta_spread < 0.02);
    for r in b.profiles.iter().chain(&g.profiles) {
        assert!(r.fitted_rate >= g.entropy.min(b.entropy) - 0.05);
    }
}

#[test]
fn loop_measures_are_covered_through_their_support() {
    let m: MarkovMeasure =
        LoopMarkov::window_max_entropy(std::sync::Arc::new(LoopSystem::renewal()), 1, 6).unwrap().into();
    let f = m.to_finite(64).unwrap();
    assert!((f.entropy() - m.entropy()).abs() < 1e-12);
    for w in [[1u64, 1], [1, 2], [2, 1], [3, 4], [4, 1]] {
        assert!((f.cylinder_mass(&word(&w)) - m.cylinder_mass(&word(&w))).abs() < 1e-15);
    }
    assert!(covering_number(&m, 8, 0.1).unwrap() >= 1);
    let unbounded: MarkovMeasure = LoopMarkov::max_entropy(std::sync::Arc::new(LoopSystem::renewal())).unwrap().into();
    assert_eq!(covering_number(&unbounded, 3, 0.1).unwrap_err().code(), "CAPACITY");
}

#[test]
fn capacity_is_enforced() {
    let m = FiniteMarkov::bernoulli(&[0.5, 0.5]).unwrap();
    assert_eq!(cylinder_masses(&m, 12, 1000).unwrap_err().code(), "CAPACITY");
    assert_eq!(covering_number(&bernoulli_half(), 3, 1.0).unwrap_err().code(), "VALIDATION");
}

#[test]
fn profile_csv_header() {
    let p = covering_profile(&bernoulli_half(), 0.1, 1, 4).unwrap();
    let mut buf = Vec::new();
    p.write_csv(&mut buf).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("n,N,rate\n1,2,"));
}

fn exhaustive_min(masses: &[f64], delta: f64) -> u64 {
    let k = masses.len();
    (0u32..1 << k)
        .filter(|s| {
            let sum: f64 = (0..k).filter(|i| s >> i & 1 == 1).map(|i| masses[i]).sum();
            sum > 1.0 - delta + 1e-12
        })
        .map(|s| s.count_ones() as u64)
        .min()
        .unwrap_or(k as u64)
}

proptest! {
    #[test]
    fn greedy_is_optimal(ws in prop::collection::vec(0.01f64..1.0, 1..10), delta in 0.05f64..0.95) {
        let total: f64 = ws.iter().sum();
        let masses: Vec<f64> = ws.iter().map(|w| w / total).collect();
        // stay away from exact ties with the threshold
        let mut sorted = masses.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        for m in &sorted {
            acc += m;
            prop_assume!((acc - (1.0 - delta)).abs() > 1e-9);
        }
        prop_assert_eq!(greedy_cover(masses.clone(), delta), exhaustive_min(&masses, delta));
    }

    #[test]
    fn cover_is_monotone(n in 1usize..8, d1 in 0.05f64..0.9, d2 in 0.05f64..0.9) {
        let m = golden();
        let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(covering_number(&m, n, lo).unwrap() >= covering_number(&m, n, hi).unwrap());
        prop_assert!(covering_number(&m, n + 1, lo).unwrap() >= covering_number(&m, n, lo).unwrap());
    }
}
