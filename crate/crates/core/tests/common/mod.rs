//! Brute-force oracles and random instances shared by the integration tests.
#![allow(dead_code)]

use apboost::infogain::{weighted_entropy, LeafTally, UnseenTally};
use apboost::{Dataset, Node, Stump, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dense-ish dataset. Small value alphabets make ties common.
pub fn random_dataset(r: &mut ChaCha8Rng, n: usize, k: usize) -> Dataset {
    let alphabet = r.gen_range(1..=6u32);
    let continuous = r.gen_bool(0.3);
    let mut labels = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        labels.push(if r.gen_bool(0.5) { 1 } else { -1 });
        let row: Vec<(usize, f64)> = (0..k)
            .filter_map(|f| {
                let v = if continuous {
                    r.gen_range(-2.0..2.0)
                } else {
                    r.gen_range(0..alphabet) as f64 - 1.0
                };
                (v != 0.0).then_some((f, v))
            })
            .collect();
        rows.push(row);
    }
    Dataset::from_rows(labels, rows, Some(k)).unwrap()
}

/// Random positive weights; sometimes with many exact duplicates.
pub fn random_weights(r: &mut ChaCha8Rng, n: usize) -> WeightVector {
    let coarse = r.gen_bool(0.3);
    let w: Vec<f64> = (0..n)
        .map(|_| {
            if coarse {
                r.gen_range(1..4) as f64
            } else {
                r.gen_range(0.001..1.0)
            }
        })
        .collect();
    let mut wv = WeightVector::from_weights(w).unwrap();
    wv.normalize().unwrap();
    wv
}

/// Every candidate stump of feature `k` on the node's examples: midpoints of
/// consecutive distinct values plus one threshold below and one above.
pub fn candidate_stumps(values: &[f64], k: usize) -> Vec<Stump> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut taus = vec![v[0] - 1.0];
    taus.extend(v.windows(2).map(|p| (p[0] + p[1]) / 2.0));
    taus.push(v[v.len() - 1] + 1.0);
    taus.iter()
        .flat_map(|&t| [Stump::new(1, k, t), Stump::new(-1, k, t)])
        .collect()
}

/// Weighted error of `s` over node positions, summed in position order.
pub fn stump_error(node: &Node, slot: usize, s: &Stump) -> f64 {
    let obs = node.observations(slot, 0, node.len());
    let wrong: f64 = obs
        .iter()
        .filter(|o| s.predict_value(o.value) != o.label)
        .map(|o| o.weight)
        .sum();
    wrong / node.total()
}

/// Minimal error over all stumps of feature slot `slot`.
pub fn brute_feature_error(node: &Node, slot: usize) -> f64 {
    let k = node.features()[slot];
    let values: Vec<f64> = node
        .observations(slot, 0, node.len())
        .iter()
        .map(|o| o.value)
        .collect();
    candidate_stumps(&values, k)
        .iter()
        .map(|s| stump_error(node, slot, s))
        .fold(f64::INFINITY, f64::min)
}

/// Minimal stump error over all features.
pub fn brute_best_error(node: &Node) -> f64 {
    (0..node.features().len())
        .map(|s| brute_feature_error(node, s))
        .fold(f64::INFINITY, f64::min)
}

/// Smallest subset size covering every constraint, by enumerating subsets.
pub fn brute_min_cover(weights: &[f64], constraints: &[Vec<usize>], target: f64) -> usize {
    let n = weights.len();
    assert!(n <= 20);
    let mut best = usize::MAX;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let ok = constraints.iter().all(|c| {
            let s: f64 = c
                .iter()
                .filter(|&&i| mask & (1 << i) != 0)
                .map(|&i| weights[i])
                .sum();
            s >= target
        });
        if ok {
            best = size;
        }
    }
    best
}

/// Random instance: examples with leaf, label, weight; a random seen subset.
/// Returns (seen leaves, unseen tally, true conditional entropy).
pub fn random_split(seed: u64) -> (Vec<LeafTally>, UnseenTally, f64) {
    let mut r = rng(seed);
    let leaves = r.gen_range(1..=3);
    let labels = r.gen_range(2..=3);
    let n = r.gen_range(1..30);
    let seen_frac = r.gen_range(0.0..1.0);
    let mut full = vec![vec![0.0; labels]; leaves];
    let mut seen = vec![vec![0.0; labels]; leaves];
    let mut unseen = vec![0.0; labels];
    for _ in 0..n {
        let (l, y, w) = (
            r.gen_range(0..leaves),
            r.gen_range(0..labels),
            r.gen_range(0.01..1.0),
        );
        full[l][y] += w;
        if r.gen_bool(seen_frac) {
            seen[l][y] += w;
        } else {
            unseen[y] += w;
        }
    }
    let truth = full.iter().map(|t| weighted_entropy(t)).sum();
    (
        seen.into_iter()
            .map(|t| LeafTally::new(t).unwrap())
            .collect(),
        UnseenTally::new(unseen).unwrap(),
        truth,
    )
}
