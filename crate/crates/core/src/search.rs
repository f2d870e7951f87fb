//! Split search at one tree node: adaptive pruning, Quick Boost, and the
//! exhaustive baseline. All three return the same greedy-optimal stump; they
//! differ only in how many (feature, example) assessments they spend.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::assessor::{FeatureAssessor, Observation, Stump};
use crate::dataset::{ExampleView, Label};
use crate::error::{Error, Result};
use crate::weights::{prefix_index, WeightVector};

/// Absolute slack for comparisons that involve an upper bound of a partially
/// assessed feature (its remaining-weight term is computed by subtraction).
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuickBoostParams {
    pub batches: usize,
    pub init_mass: f64,
}

impl Default for QuickBoostParams {
    fn default() -> Self {
        QuickBoostParams {
            batches: 16,
            init_mass: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    Adaptive,
    QuickBoost(QuickBoostParams),
    Exhaustive,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Adaptive => "ap",
            Strategy::QuickBoost(_) => "qb",
            Strategy::Exhaustive => "classic",
        }
    }
}

/// A feature dropped from the search, with the state that justified it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneEvent {
    pub feature: usize,
    pub m: usize,
    pub lb: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub stump: Stump,
    /// Exact weighted error of `stump` on the node, in `[0, 1]`.
    pub error: f64,
    pub assessments: u64,
    /// Examples assessed per dataset feature (0 for features not searched).
    pub per_feature_m: Vec<usize>,
    pub pruned: Vec<PruneEvent>,
}

/// The examples of one tree node in descending weight order, with node-local
/// normalized weights and per-feature access to their values.
#[derive(Debug)]
pub struct Node {
    members: Vec<u32>,
    labels: Vec<Label>,
    weights: Vec<f64>,
    prefix: Vec<f64>,
    features: Vec<usize>,
    n_features_total: usize,
    /// For each searched feature: `(position, value)` of the explicit entries.
    columns: Vec<Vec<(u32, f64)>>,
}

impl Node {
    /// Builds the node for `view` under the global weights `wv`.
    ///
    /// `features` restricts the search (sorted, 0-based); `None` means all.
    pub fn new(
        view: &ExampleView<'_>,
        wv: &WeightVector,
        features: Option<&[usize]>,
    ) -> Result<Self> {
        let data = view.base();
        if view.is_empty() {
            return Err(Error::arg("cannot search an empty node"));
        }
        if wv.len() != data.len() {
            return Err(Error::arg("weight vector does not match the dataset"));
        }
        let rank = wv.ranks();
        let mut members = view.members().to_vec();
        members.sort_by_key(|&i| rank[i as usize]);

        let raw: Vec<f64> = members.iter().map(|&i| wv.weight(i as usize)).collect();
        let total: f64 = raw.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mut prefix = Vec::with_capacity(weights.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for w in &weights {
            acc += w;
            prefix.push(acc);
        }
        let labels = members.iter().map(|&i| data.label(i as usize)).collect();

        let features: Vec<usize> = match features {
            Some(f) => {
                if let Some(&bad) = f.iter().find(|&&k| k >= data.n_features()) {
                    return Err(Error::arg(format!("feature {} out of range", bad + 1)));
                }
                let mut f = f.to_vec();
                f.sort_unstable();
                f.dedup();
                f
            }
            None => (0..data.n_features()).collect(),
        };
        if features.is_empty() {
            return Err(Error::arg("no features to search"));
        }

        const ABSENT: u32 = u32::MAX;
        let mut position = vec![ABSENT; data.len()];
        for (p, &i) in members.iter().enumerate() {
            position[i as usize] = p as u32;
        }
        let columns = features
            .iter()
            .map(|&k| {
                let mut col: Vec<(u32, f64)> = data
                    .column(k)
                    .iter()
                    .filter(|(i, _)| position[*i as usize] != ABSENT)
                    .map(|&(i, v)| (position[i as usize], v))
                    .collect();
                col.sort_unstable_by_key(|e| e.0);
                col
            })
            .collect();

        Ok(Node {
            members,
            labels,
            weights,
            prefix,
            features,
            n_features_total: data.n_features(),
            columns,
        })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Example indices in weight order.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Node-local normalized weights in weight order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn total(&self) -> f64 {
        self.prefix[self.len()]
    }

    /// Searched features, ascending.
    pub fn features(&self) -> &[usize] {
        &self.features
    }

    pub fn prefix_index(&self, target: f64) -> usize {
        prefix_index(&self.prefix, target)
    }

    pub(crate) fn n_features_total(&self) -> usize {
        self.n_features_total
    }

    /// Observations of feature slot `slot` at positions `start..end`.
    pub fn observations(&self, slot: usize, start: usize, end: usize) -> Vec<Observation> {
        let mut out = Vec::with_capacity(end - start);
        self.fill(slot, start, end, &mut out);
        out
    }

    fn fill(&self, slot: usize, start: usize, end: usize, out: &mut Vec<Observation>) {
        out.clear();
        let col = &self.columns[slot];
        let mut nz = col.partition_point(|e| (e.0 as usize) < start);
        for p in start..end {
            let value = if nz < col.len() && col[nz].0 as usize == p {
                nz += 1;
                col[nz - 1].1
            } else {
                0.0
            };
            out.push(Observation {
                value,
                label: self.labels[p],
                weight: self.weights[p],
            });
        }
    }

    pub(crate) fn assessor(&self, slot: usize) -> FeatureAssessor {
        FeatureAssessor::new(self.features[slot], self.len(), self.total())
    }

    /// Fully assesses feature slot `slot` on a fresh assessor.
    pub fn assess_all(&self, slot: usize) -> FeatureAssessor {
        let mut a = self.assessor(slot);
        let obs = self.observations(slot, 0, self.len());
        a.assess(0, &obs)
            .expect("fresh assessor accepts a full batch");
        a
    }
}

/// Per-feature search state.
struct Arm {
    assessor: FeatureAssessor,
    buf: Vec<Observation>,
}

impl Arm {
    fn extend_to(&mut self, node: &Node, slot: usize, m: usize) {
        let start = self.assessor.m_seen();
        let m = m.min(node.len());
        if m <= start {
            return;
        }
        node.fill(slot, start, m, &mut self.buf);
        self.assessor
            .assess(start, &self.buf)
            .expect("batches are contiguous and in range");
    }

    /// Adds the heaviest unseen examples covering at least `gap` error units
    /// (at least one example).
    fn grow_by(&mut self, node: &Node, slot: usize, gap: f64) {
        let m = self.assessor.m_seen();
        let target = node.prefix[m] + gap * node.total();
        let next = node.prefix_index(target).max(m + 1);
        self.extend_to(node, slot, next);
    }

    fn lb(&self) -> f64 {
        self.assessor.lb()
    }

    fn ub(&self) -> f64 {
        self.assessor.ub()
    }

    fn full(&self) -> bool {
        self.assessor.is_complete()
    }
}

/// Whether `challenger` can be discarded given `leader`.
///
/// While the leader is partial its upper bound involves a subtraction, so the
/// challenger must clear it by more than the tolerance. Once the leader is
/// exact the comparison is exact too: a partial lower bound never exceeds the
/// full error, so `lb >= E` with a higher feature index, or `lb > E`, proves
/// the challenger loses under the canonical (error, index) order.
fn dominated(leader: &Arm, challenger: &Arm) -> bool {
    if challenger.lb() - leader.ub() > TIE_TOLERANCE {
        return true;
    }
    if !leader.full() {
        return false;
    }
    let (e, lb) = (leader.lb(), challenger.lb());
    lb > e || (lb == e && challenger.assessor.feature() > leader.assessor.feature())
}

/// Canonical order between two fully assessed features.
fn canonical_cmp(x: &Arm, y: &Arm) -> Ordering {
    x.lb()
        .total_cmp(&y.lb())
        .then(x.assessor.feature().cmp(&y.assessor.feature()))
}

fn new_arms(node: &Node) -> Vec<Arm> {
    (0..node.features.len())
        .map(|slot| Arm {
            assessor: node.assessor(slot),
            buf: Vec::new(),
        })
        .collect()
}

fn finish(node: &Node, arms: &mut [Arm], winner: usize, pruned: Vec<PruneEvent>) -> SearchResult {
    arms[winner].extend_to(node, winner, node.len());
    let a = &arms[winner].assessor;
    let mut per_feature_m = vec![0usize; node.n_features_total()];
    let mut assessments = 0;
    for arm in arms.iter() {
        per_feature_m[arm.assessor.feature()] = arm.assessor.m_seen();
        assessments += arm.assessor.assess_count();
    }
    SearchResult {
        stump: a.best_stump().expect("winner is fully assessed"),
        error: a.lb(),
        assessments,
        per_feature_m,
        pruned,
    }
}

/// Entry point: runs `strategy` on `view` under weights `wv`.
pub fn find_stump(
    view: &ExampleView<'_>,
    wv: &WeightVector,
    strategy: Strategy,
    features: Option<&[usize]>,
) -> Result<SearchResult> {
    let node = Node::new(view, wv, features)?;
    search_node(&node, strategy)
}

pub fn search_node(node: &Node, strategy: Strategy) -> Result<SearchResult> {
    match strategy {
        Strategy::Adaptive => Ok(adaptive_search(node)),
        Strategy::QuickBoost(p) => quick_boost_search(node, p),
        Strategy::Exhaustive => Ok(exhaustive_search(node)),
    }
}

pub fn adaptive_pruning_stump(view: &ExampleView<'_>, wv: &WeightVector) -> Result<SearchResult> {
    find_stump(view, wv, Strategy::Adaptive, None)
}

pub fn quick_boost_stump(
    view: &ExampleView<'_>,
    wv: &WeightVector,
    params: QuickBoostParams,
) -> Result<SearchResult> {
    find_stump(view, wv, Strategy::QuickBoost(params), None)
}

pub fn exhaustive_stump(view: &ExampleView<'_>, wv: &WeightVector) -> Result<SearchResult> {
    find_stump(view, wv, Strategy::Exhaustive, None)
}

/// Heap key for the challenger queue: smallest lower bound, then lowest index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LbKey {
    lb: f64,
    slot: usize,
}

impl Eq for LbKey {}

impl Ord for LbKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.lb
            .total_cmp(&other.lb)
            .then(self.slot.cmp(&other.slot))
    }
}

impl PartialOrd for LbKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Adaptive-pruning search.
///
/// Every feature first sees the heaviest half of the node weight. Then the
/// leader `a` (minimal upper bound) and the challenger `b` (minimal lower
/// bound among the rest) are grown by batches whose weight equals the gap
/// between their bounds, until every challenger is dominated.
fn adaptive_search(node: &Node) -> SearchResult {
    let k = node.features.len();
    let mut arms = new_arms(node);
    let m0 = node.prefix_index(0.5 * node.total()).max(1);
    for (slot, arm) in arms.iter_mut().enumerate() {
        arm.extend_to(node, slot, m0);
    }
    if k == 1 {
        return finish(node, &mut arms, 0, Vec::new());
    }

    let by_ub =
        |arms: &[Arm], x: usize, y: usize| arms[x].ub().total_cmp(&arms[y].ub()).then(x.cmp(&y));
    let mut a = (1..k).fold(0, |best, s| {
        if by_ub(&arms, s, best) == Ordering::Less {
            s
        } else {
            best
        }
    });
    let mut heap: BinaryHeap<Reverse<LbKey>> = (0..k)
        .filter(|&s| s != a)
        .map(|s| {
            Reverse(LbKey {
                lb: arms[s].lb(),
                slot: s,
            })
        })
        .collect();
    let mut alive = vec![true; k];
    let mut pruned = Vec::new();

    while let Some(Reverse(key)) = heap.pop() {
        let b = key.slot;
        // stale entries: pruned, promoted to leader, or lower bound moved since
        if !alive[b] || b == a || key.lb.to_bits() != arms[b].lb().to_bits() {
            continue;
        }
        if dominated(&arms[a], &arms[b]) {
            alive[b] = false;
            pruned.push(PruneEvent {
                feature: node.features[b],
                m: arms[b].assessor.m_seen(),
                lb: arms[b].lb(),
            });
            continue;
        }
        let gap = arms[a].ub() - arms[b].lb();
        arms[a].grow_by(node, a, gap.max(0.0));
        if !dominated(&arms[a], &arms[b]) {
            // at least one more example even when the bounds already meet
            let gap = arms[a].ub() - arms[b].lb();
            arms[b].grow_by(node, b, gap.max(0.0));
        }
        // the challenger takes over as leader when its upper bound is lower
        let (leader, other) = if by_ub(&arms, b, a) == Ordering::Less {
            (b, a)
        } else {
            (a, b)
        };
        a = leader;
        heap.push(Reverse(LbKey {
            lb: arms[other].lb(),
            slot: other,
        }));
    }
    finish(node, &mut arms, a, pruned)
}

/// Quick Boost: estimate every feature on an initial prefix, fully assess the
/// most promising one, then test the others batch by batch against it.
fn quick_boost_search(node: &Node, params: QuickBoostParams) -> Result<SearchResult> {
    if params.batches == 0 {
        return Err(Error::arg("Quick Boost needs at least one batch"));
    }
    if !(params.init_mass > 0.0 && params.init_mass < 1.0) {
        return Err(Error::arg("Quick Boost initial mass must lie in (0, 1)"));
    }
    let n = node.len();
    let k = node.features.len();
    let mut arms = new_arms(node);
    let m0 = node.prefix_index(params.init_mass * node.total()).max(1);
    for (slot, arm) in arms.iter_mut().enumerate() {
        arm.extend_to(node, slot, m0);
    }

    let mut promise: Vec<usize> = (0..k).collect();
    let estimate = |arm: &Arm| arm.assessor.error_so_far().unwrap_or(0.0);
    promise.sort_by(|&x, &y| {
        estimate(&arms[x])
            .total_cmp(&estimate(&arms[y]))
            .then(x.cmp(&y))
    });

    let z0 = node.prefix[m0.min(n)];
    let rest = node.total() - z0;
    let mut bounds = Vec::with_capacity(params.batches);
    for i in 1..=params.batches {
        let m = if i == params.batches {
            n
        } else {
            node.prefix_index(z0 + rest * i as f64 / params.batches as f64)
        };
        if bounds.last().map_or(m > m0, |&last| m > last) {
            bounds.push(m);
        }
    }

    let mut incumbent = promise[0];
    arms[incumbent].extend_to(node, incumbent, n);
    let mut pruned = Vec::new();
    for &f in &promise[1..] {
        let mut survived = !dominated(&arms[incumbent], &arms[f]);
        if survived {
            for &m in &bounds {
                arms[f].extend_to(node, f, m);
                if dominated(&arms[incumbent], &arms[f]) {
                    survived = false;
                    break;
                }
            }
        }
        if survived {
            debug_assert!(arms[f].full());
            // survived a full assessment, so it beats the incumbent canonically
            incumbent = f;
        } else {
            pruned.push(PruneEvent {
                feature: node.features[f],
                m: arms[f].assessor.m_seen(),
                lb: arms[f].lb(),
            });
        }
    }
    Ok(finish(node, &mut arms, incumbent, pruned))
}

fn exhaustive_search(node: &Node) -> SearchResult {
    let mut arms = new_arms(node);
    let mut best = 0;
    for slot in 0..arms.len() {
        arms[slot].extend_to(node, slot, node.len());
        if slot > 0 && canonical_cmp(&arms[slot], &arms[best]) == Ordering::Less {
            best = slot;
        }
    }
    finish(node, &mut arms, best, Vec::new())
}
