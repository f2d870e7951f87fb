mod common;

use apboost::WeightVector;
use proptest::prelude::*;
use rand::Rng;

use common::rng;

/// Order by a full sort: heavier first, lower index on ties.
fn sorted_order(w: &[f64]) -> Vec<u32> {
    let mut order: Vec<u32> = (0..w.len() as u32).collect();
    order.sort_by(|&a, &b| w[b as usize].total_cmp(&w[a as usize]).then(a.cmp(&b)));
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn update_order_equals_full_sort(seed in any::<u64>(), n in 1usize..200, alpha in -3.0f64..3.0) {
        let mut r = rng(seed);
        let coarse = r.gen_bool(0.4);
        let w: Vec<f64> = (0..n).map(|_| if coarse { r.gen_range(1..5) as f64 } else { r.gen_range(0.01..1.0) }).collect();
        let mut wv = WeightVector::from_weights(w).unwrap();
        wv.normalize().unwrap();
        let labels: Vec<i8> = (0..n).map(|_| if r.gen_bool(0.5) { 1 } else { -1 }).collect();
        let preds: Vec<i8> = labels.iter().map(|&y| if r.gen_bool(0.3) { -y } else { y }).collect();
        let comparisons = wv.adaboost_update(&preds, &labels, alpha).unwrap();
        prop_assert_eq!(wv.order(), &sorted_order(wv.weights())[..]);
        prop_assert!(comparisons <= 3 * n);
        prop_assert!((wv.total() - 1.0).abs() < 1e-12);
        let mut acc = 0.0;
        for (m, &i) in wv.order().iter().enumerate() {
            prop_assert_eq!(wv.prefix()[m], acc);
            acc += wv.weight(i as usize);
        }
    }

    #[test]
    fn prefix_index_is_minimal(seed in any::<u64>(), n in 1usize..50, t in 0.0f64..1.2) {
        let mut r = rng(seed);
        let w: Vec<f64> = (0..n).map(|_| r.gen_range(0.01..1.0)).collect();
        let mut wv = WeightVector::from_weights(w).unwrap();
        wv.normalize().unwrap();
        let m = wv.prefix_index(t);
        let z = wv.prefix();
        if m < n {
            prop_assert!(z[m] >= t);
        }
        if m > 0 {
            prop_assert!(z[m - 1] < t);
        }
    }
}

#[test]
fn repeated_updates_stay_sorted() {
    let mut r = rng(11);
    let n = 300;
    let mut wv = WeightVector::uniform(n).unwrap();
    let labels: Vec<i8> = (0..n)
        .map(|_| if r.gen_bool(0.5) { 1 } else { -1 })
        .collect();
    for _ in 0..50 {
        let preds: Vec<i8> = labels
            .iter()
            .map(|&y| if r.gen_bool(0.2) { -y } else { y })
            .collect();
        wv.adaboost_update(&preds, &labels, r.gen_range(0.05..1.5))
            .unwrap();
        assert_eq!(wv.order(), &sorted_order(wv.weights())[..]);
    }
}

#[test]
fn degenerate_inputs() {
    assert!(WeightVector::uniform(0).is_err());
    let mut wv = WeightVector::uniform(2).unwrap();
    // exp(800) overflows the total
    assert!(wv.adaboost_update(&[1, -1], &[1, 1], 800.0).is_err());
}
