//! Metrics checked against naive recomputation and their algebraic
//! invariants.

use cellsort_core::metrics::*;
use cellsort_core::Direction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn naive_sortedness(v: &[i64], dir: Direction, strict: bool) -> f64 {
    if v.is_empty() {
        return 1.0;
    }
    let mut ok = 1usize;
    for i in 1..v.len() {
        let (a, b) = (v[i - 1], v[i]);
        let fine = match (dir, strict) {
            (Direction::Increasing, true) => a < b,
            (Direction::Increasing, false) => a <= b,
            (Direction::Decreasing, true) => a > b,
            (Direction::Decreasing, false) => a >= b,
        };
        if fine {
            ok += 1;
        }
    }
    ok as f64 / v.len() as f64
}

fn naive_error(v: &[i64], dir: Direction) -> u32 {
    let mut e = 0;
    for i in 1..v.len() {
        let bad = match dir {
            Direction::Increasing => v[i - 1] > v[i],
            Direction::Decreasing => v[i - 1] < v[i],
        };
        e += u32::from(bad);
    }
    e
}

#[test]
fn thousand_random_arrays_match_naive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let n = rng.random_range(1..60);
        let v: Vec<i64> = (0..n).map(|_| rng.random_range(-5..20)).collect();
        for dir in [Direction::Increasing, Direction::Decreasing] {
            for strict in [true, false] {
                assert_eq!(sortedness_of(&v, dir, strict), naive_sortedness(&v, dir, strict));
            }
            assert_eq!(monotonicity_error_of(&v, dir), naive_error(&v, dir));
        }
        if n >= 2 {
            let labels: Vec<u8> = v.iter().map(|x| (x.rem_euclid(3)) as u8).collect();
            let same = (1..n).filter(|&i| labels[i] == labels[i - 1]).count();
            assert_eq!(aggregation_of(&labels).unwrap(), same as f64 / (n - 1) as f64);
        }
    }
}

#[test]
fn random_two_label_assignments_aggregate_near_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trials = 10_000;
    let mut total = 0.0;
    for _ in 0..trials {
        let mut labels = [0u8; 100];
        labels[50..].fill(1);
        rand::seq::SliceRandom::shuffle(&mut labels[..], &mut rng);
        total += aggregation_of(&labels).unwrap();
    }
    let mean = total / trials as f64;
    assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
}

#[test]
fn aggregation_needs_two_cells() {
    assert_eq!(aggregation_of(&[0]).unwrap_err().key, "n");
}

fn trajectory() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..=100, 0..80).prop_map(|v| v.into_iter().map(|x| x as f64 / 100.0).collect())
}

proptest! {
    #[test]
    fn sortedness_bounds(v in prop::collection::vec(-10i64..10, 1..200)) {
        for dir in [Direction::Increasing, Direction::Decreasing] {
            let s = sortedness_of(&v, dir, true);
            prop_assert!((0.0..=1.0).contains(&s));
            let e = monotonicity_error_of(&v, dir);
            prop_assert!(e as usize <= v.len() - 1);
            let mut sorted = v.clone();
            sorted.sort();
            if dir == Direction::Decreasing {
                sorted.reverse();
            }
            prop_assert_eq!(e == 0, sorted == v);
            prop_assert_eq!(sortedness_of(&v, dir, false) == 1.0, e == 0);
        }
    }

    #[test]
    fn dg_formulas_differ_by_one(t in trajectory()) {
        for ev in segment_dg_events(&t) {
            prop_assert!(ev.drop > 0.0);
            prop_assert!(ev.rise >= 0.0);
            prop_assert_eq!(ev.score(DgFormula::Methods), ev.score(DgFormula::Fig6D) - 1.0);
        }
    }

    #[test]
    fn dg_terms_telescope(t in trajectory()) {
        let events = segment_dg_events(&t);
        let lhs = initial_rise(&t) + events.iter().map(|e| e.rise - e.drop).sum::<f64>();
        let rhs = match (t.first(), t.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        };
        prop_assert!((lhs - rhs).abs() < 1e-12, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn resampling_hits_endpoints(t in prop::collection::vec(0.0f64..1.0, 1..300)) {
        let r = resample(&t, 101);
        prop_assert_eq!(r.len(), 101);
        prop_assert_eq!(r[0], t[0]);
        prop_assert_eq!(r[100], *t.last().unwrap());
    }
}
