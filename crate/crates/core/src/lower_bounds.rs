//! Lower bounds on the assessments any exact pruning search must spend at a
//! node.
//!
//! Both bounds charge `n` for the returned feature, which must be assessed in
//! full. For every other feature they count the examples needed before each of
//! its stumps provably errs at least as much as the best one: `weight_order_lb`
//! when examples are consumed heaviest first, `exact_lb` for the best possible
//! example subset (a small covering integer program).
//!
//! A feature whose error ties the best one is charged like any other: under
//! the canonical (error, lowest index) tie-break it is discarded as soon as its
//! lower bound reaches `E*`, it need not be shown strictly worse.

use crate::dataset::ExampleView;
use crate::error::{Error, Result};
use crate::search::{Node, TIE_TOLERANCE};
use crate::weights::WeightVector;

/// Default branch-and-bound node budget for [`exact_lb`].
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

/// Exact per-feature errors from full assessment of every feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Oracle {
    /// Error of the best stump per searched feature slot.
    pub errors: Vec<f64>,
    pub e_star: f64,
    /// Slot of the returned feature (lowest index among exact minima).
    pub k_star: usize,
}

impl Oracle {
    pub fn new(node: &Node) -> Self {
        let errors: Vec<f64> = (0..node.features().len())
            .map(|s| node.assess_all(s).lb())
            .collect();
        let mut k_star = 0;
        for (s, e) in errors.iter().enumerate() {
            if *e < errors[k_star] {
                k_star = s;
            }
        }
        Oracle {
            e_star: errors[k_star],
            errors,
            k_star,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightOrderLb {
    pub total: u64,
    /// Required prefix length per searched feature slot (`n` for the returned
    /// feature).
    pub per_feature: Vec<usize>,
    pub e_star: f64,
    /// 0-based dataset feature index of the returned feature.
    pub k_star: usize,
}

pub fn weight_order_lb(view: &ExampleView<'_>, wv: &WeightVector) -> Result<WeightOrderLb> {
    Ok(weight_order_lb_node(&Node::new(view, wv, None)?))
}

pub fn weight_order_lb_node(node: &Node) -> WeightOrderLb {
    let oracle = Oracle::new(node);
    let n = node.len();
    let per_feature: Vec<usize> = (0..node.features().len())
        .map(|s| {
            if s == oracle.k_star {
                n
            } else {
                min_weight_order_prefix(node, s, oracle.e_star)
            }
        })
        .collect();
    WeightOrderLb {
        total: per_feature.iter().map(|&m| m as u64).sum(),
        per_feature,
        e_star: oracle.e_star,
        k_star: node.features()[oracle.k_star],
    }
}

/// Smallest `m` whose assessed lower bound reaches `e_star` (within tolerance).
/// The bound is monotone in `m`, so a binary search over fresh prefixes works.
fn min_weight_order_prefix(node: &Node, slot: usize, e_star: f64) -> usize {
    let reached = |m: usize| {
        let mut a = node.assessor(slot);
        a.assess(0, &node.observations(slot, 0, m))
            .expect("fresh assessor accepts a prefix");
        a.lb() >= e_star - TIE_TOLERANCE
    };
    let (mut lo, mut hi) = (0, node.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if reached(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Shortest prefix `0..m` of the items (taken in the given order) that covers
/// every constraint: `sum_{i < m, i in S_j} w_i >= target` for all `j`.
///
/// With items in descending weight order this is the weight-order analogue of
/// [`min_cover`]. Returns `None` when even all items fall short.
pub fn weight_order_cover(
    weights: &[f64],
    constraints: &[Vec<usize>],
    target: f64,
) -> Option<usize> {
    if target.is_nan() || target <= 0.0 {
        return Some(0);
    }
    let mut m = 0;
    for c in constraints {
        let mut members = c.clone();
        members.sort_unstable();
        members.dedup();
        let mut acc = 0.0;
        let reach = members.iter().position(|&i| {
            acc += weights[i];
            acc >= target
        })?;
        m = m.max(members[reach] + 1);
    }
    Some(m)
}

/// Outcome of one covering search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cover {
    /// Minimum cover size, or a valid lower bound on it when `exact` is false.
    pub count: usize,
    pub exact: bool,
}

/// Minimum number of items whose weights cover every constraint:
/// `sum_{i in M and in S_j} w_i >= target` for all `j`.
///
/// `constraints[j]` lists the item indices of `S_j`. Solved by depth-first
/// branch and bound over items in descending weight order. `budget` is the
/// number of search nodes still allowed and is decremented in place; when it
/// runs out the root bound is returned with `exact = false`.
pub fn min_cover(
    weights: &[f64],
    constraints: &[Vec<usize>],
    target: f64,
    budget: &mut u64,
) -> Result<Cover> {
    if target.is_nan() || target <= 0.0 || constraints.is_empty() {
        return Ok(Cover {
            count: 0,
            exact: true,
        });
    }
    for (j, c) in constraints.iter().enumerate() {
        if let Some(&bad) = c.iter().find(|&&i| i >= weights.len()) {
            return Err(Error::arg(format!(
                "constraint {j} names unknown item {bad}"
            )));
        }
        let total: f64 = c.iter().map(|&i| weights[i]).sum();
        if total < target {
            return Err(Error::OracleMismatch(format!(
                "constraint {j} can reach only {total}, below the target {target}"
            )));
        }
    }
    let mut problem = CoverProblem::new(weights, constraints, target);
    Ok(problem.solve(budget))
}

/// Items with identical constraint membership. Within a class only the
/// number taken matters, and the heaviest ones are always the best choice.
struct Class {
    constraints: Vec<u32>,
    /// Prefix sums of member weights, heaviest first.
    prefix: Vec<f64>,
}

impl Class {
    fn size(&self) -> usize {
        self.prefix.len() - 1
    }
}

struct CoverProblem {
    target: f64,
    /// In search order: heaviest leading item first.
    classes: Vec<Class>,
    /// Per constraint: `(weight, class position)` of its items, heaviest first.
    items_of: Vec<Vec<(f64, u32)>>,
    /// A constraint disjoint from each constraint, if any. Disjoint needs add up.
    partner: Vec<Option<usize>>,
}

struct SearchState {
    chosen: usize,
    best: usize,
    nodes_left: u64,
    aborted: bool,
}

impl CoverProblem {
    fn new(weights: &[f64], constraints: &[Vec<usize>], target: f64) -> Self {
        let constraints = reduce_constraints(weights.len(), constraints);
        let mut member: Vec<Vec<u32>> = vec![Vec::new(); weights.len()];
        for (j, c) in constraints.iter().enumerate() {
            for &i in c {
                member[i].push(j as u32);
            }
        }
        // Only positive-weight items that appear somewhere can help.
        let mut items: Vec<usize> = (0..weights.len())
            .filter(|&i| weights[i] > 0.0 && !member[i].is_empty())
            .collect();
        items.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));

        let mut index = std::collections::HashMap::new();
        let mut groups: Vec<(Vec<u32>, Vec<f64>)> = Vec::new();
        for &i in &items {
            let sig = member[i].clone();
            let g = *index.entry(sig.clone()).or_insert_with(|| {
                groups.push((sig, Vec::new()));
                groups.len() - 1
            });
            groups[g].1.push(weights[i]);
        }
        let classes: Vec<Class> = groups
            .into_iter()
            .map(|(constraints, ws)| {
                let mut prefix = Vec::with_capacity(ws.len() + 1);
                let mut acc = 0.0;
                prefix.push(acc);
                for w in ws {
                    acc += w;
                    prefix.push(acc);
                }
                Class {
                    constraints,
                    prefix,
                }
            })
            .collect();

        let mut items_of: Vec<Vec<(f64, u32)>> = vec![Vec::new(); constraints.len()];
        for (c, class) in classes.iter().enumerate() {
            for k in 0..class.size() {
                let w = class.prefix[k + 1] - class.prefix[k];
                for &j in &class.constraints {
                    items_of[j as usize].push((w, c as u32));
                }
            }
        }
        for list in &mut items_of {
            list.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        }

        let sets: Vec<Vec<bool>> = (0..constraints.len())
            .map(|j| {
                let mut in_j = vec![false; classes.len()];
                for (c, class) in classes.iter().enumerate() {
                    in_j[c] = class.constraints.contains(&(j as u32));
                }
                in_j
            })
            .collect();
        let partner = (0..constraints.len())
            .map(|j| {
                (0..constraints.len())
                    .filter(|&k| k != j && !sets[j].iter().zip(&sets[k]).any(|(a, b)| *a && *b))
                    .max_by_key(|&k| items_of[k].len())
            })
            .collect();

        CoverProblem {
            target,
            classes,
            items_of,
            partner,
        }
    }

    fn n_constraints(&self) -> usize {
        self.items_of.len()
    }

    /// Fewest items from the classes at position `from` or later that can
    /// still cover constraint `j`, or `None` if it cannot be covered.
    fn need(&self, j: usize, cover: &[f64], from: usize) -> Option<usize> {
        let residual = self.target - cover[j];
        if residual <= 0.0 {
            return Some(0);
        }
        let mut acc = 0.0;
        let mut count = 0;
        for &(w, c) in &self.items_of[j] {
            if (c as usize) < from {
                continue;
            }
            acc += w;
            count += 1;
            if acc >= residual {
                return Some(count);
            }
        }
        None
    }

    /// Items still needed: the largest single-constraint need, or the sum of
    /// the needs of two disjoint constraints.
    fn bound(&self, cover: &[f64], from: usize) -> Option<usize> {
        let needs: Vec<usize> = (0..self.n_constraints())
            .map(|j| self.need(j, cover, from))
            .collect::<Option<_>>()?;
        let mut best = 0;
        for (j, &nj) in needs.iter().enumerate() {
            let pair = self.partner[j].map_or(0, |k| needs[k]);
            best = best.max(nj + pair);
        }
        Some(best)
    }

    fn met(&self, cover: &[f64]) -> bool {
        cover.iter().all(|&c| c >= self.target)
    }

    /// Heaviest-first greedy over whole items; seeds the search.
    fn incumbent(&self) -> usize {
        let mut cover = vec![0.0; self.n_constraints()];
        let mut taken = vec![0usize; self.classes.len()];
        let mut count = 0;
        while !self.met(&cover) {
            let mut best = None;
            let mut best_score = 0.0;
            for (c, class) in self.classes.iter().enumerate() {
                if taken[c] == class.size() {
                    continue;
                }
                let w = class.prefix[taken[c] + 1] - class.prefix[taken[c]];
                let score: f64 = class
                    .constraints
                    .iter()
                    .map(|&j| {
                        let r = self.target - cover[j as usize];
                        if r > 0.0 {
                            w.min(r) / r
                        } else {
                            0.0
                        }
                    })
                    .sum();
                if score > best_score {
                    best_score = score;
                    best = Some(c);
                }
            }
            let Some(c) = best else {
                return usize::MAX;
            };
            let w = self.classes[c].prefix[taken[c] + 1] - self.classes[c].prefix[taken[c]];
            for &j in &self.classes[c].constraints {
                cover[j as usize] += w;
            }
            taken[c] += 1;
            count += 1;
        }
        count
    }

    fn solve(&mut self, budget: &mut u64) -> Cover {
        let cover = vec![0.0; self.n_constraints()];
        let root = self
            .bound(&cover, 0)
            .expect("feasibility was checked up front");
        let best = self.incumbent();
        if root >= best {
            return Cover {
                count: best,
                exact: true,
            };
        }
        let mut st = SearchState {
            chosen: 0,
            best,
            nodes_left: *budget,
            aborted: false,
        };
        self.dfs(0, &cover, &mut st);
        *budget = st.nodes_left;
        Cover {
            count: if st.aborted { root } else { st.best },
            exact: !st.aborted,
        }
    }

    fn dfs(&self, c: usize, cover: &[f64], st: &mut SearchState) {
        if st.aborted {
            return;
        }
        if st.nodes_left == 0 {
            st.aborted = true;
            return;
        }
        st.nodes_left -= 1;
        let Some(need) = self.bound(cover, c) else {
            return;
        };
        if need == 0 {
            st.best = st.best.min(st.chosen);
            return;
        }
        if st.chosen + need >= st.best || c == self.classes.len() {
            return;
        }
        let class = &self.classes[c];
        // More than enough for every constraint of this class is wasted.
        let mut most = 0;
        for &j in &class.constraints {
            let r = self.target - cover[j as usize];
            if r > 0.0 {
                let t = class.prefix.partition_point(|&z| z < r);
                most = most.max(t.min(class.size()));
            }
        }
        most = most.min(st.best - st.chosen - 1);
        let mut next = cover.to_vec();
        for t in (0..=most).rev() {
            next.copy_from_slice(cover);
            for &j in &class.constraints {
                next[j as usize] += class.prefix[t];
            }
            st.chosen += t;
            self.dfs(c + 1, &next, st);
            st.chosen -= t;
            if st.aborted {
                return;
            }
        }
    }
}

/// Drops duplicate constraints and, for small systems, constraints that
/// contain another one (covering the subset covers the superset).
fn reduce_constraints(n_items: usize, constraints: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut sets: Vec<Vec<usize>> = constraints
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    sets.sort();
    sets.dedup();
    if sets.len() > 256 {
        return sets;
    }
    let words = n_items.div_ceil(64);
    let bits: Vec<Vec<u64>> = sets
        .iter()
        .map(|c| {
            let mut b = vec![0u64; words];
            for &i in c {
                b[i / 64] |= 1 << (i % 64);
            }
            b
        })
        .collect();
    let subset = |a: &[u64], b: &[u64]| a.iter().zip(b).all(|(x, y)| x & !y == 0);
    let keep: Vec<bool> = (0..sets.len())
        .map(|j| {
            !(0..sets.len())
                .any(|i| i != j && sets[i].len() < sets[j].len() && subset(&bits[i], &bits[j]))
        })
        .collect();
    sets.into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// Stumps of one feature as misclassified-example sets (node positions): both
/// polarities for every threshold interval of the fully assessed column.
pub fn stump_error_sets(node: &Node, slot: usize) -> Vec<Vec<usize>> {
    let obs = node.observations(slot, 0, node.len());
    let values = node.assess_all(slot).values();
    let mut sets = Vec::with_capacity(2 * (values.len() + 1));
    // interval i: threshold between values[i-1] and values[i]
    for i in 0..=values.len() {
        let above = |v: f64| i < values.len() && v >= values[i];
        for polarity in [1i8, -1] {
            let wrong = obs
                .iter()
                .enumerate()
                .filter(|(_, o)| {
                    let h = if above(o.value) { polarity } else { -polarity };
                    h != o.label
                })
                .map(|(p, _)| p)
                .collect();
            sets.push(wrong);
        }
    }
    sets
}

/// Minimum number of node examples that prove every stump of feature slot
/// `slot` at least as bad as `e_star`.
pub fn min_prune_set(node: &Node, slot: usize, e_star: f64, budget: &mut u64) -> Result<Cover> {
    let target = (e_star - TIE_TOLERANCE) * node.total();
    min_cover(
        node.weights(),
        &stump_error_sets(node, slot),
        target,
        budget,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactLb {
    pub total: u64,
    pub per_feature: Vec<usize>,
    pub e_star: f64,
    pub k_star: usize,
}

pub fn exact_lb(view: &ExampleView<'_>, wv: &WeightVector, budget: u64) -> Result<ExactLb> {
    exact_lb_node(&Node::new(view, wv, None)?, budget)
}

/// Exact lower bound at one node. When the node budget (shared by all
/// features) runs out, fails with [`Error::BoundTimeout`] carrying a partial
/// bound that is still valid.
pub fn exact_lb_node(node: &Node, budget: u64) -> Result<ExactLb> {
    let oracle = Oracle::new(node);
    let n = node.len();
    let mut left = budget;
    let mut exact = true;
    let mut per_feature = Vec::with_capacity(node.features().len());
    for s in 0..node.features().len() {
        if s == oracle.k_star {
            per_feature.push(n);
            continue;
        }
        let cover = min_prune_set(node, s, oracle.e_star, &mut left)?;
        exact &= cover.exact;
        per_feature.push(cover.count);
    }
    let total = per_feature.iter().map(|&m| m as u64).sum();
    if !exact {
        return Err(Error::BoundTimeout { partial: total });
    }
    Ok(ExactLb {
        total,
        per_feature,
        e_star: oracle.e_star,
        k_star: node.features()[oracle.k_star],
    })
}
