//! Boosting weights kept in descending order with prefix sums.
//!
//! Ties in weight are always broken by ascending example index, so every
//! strategy sees the same example sequence.

use std::cmp::Ordering;

use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    /// position -> example index
    order: Vec<u32>,
    /// example index -> weight
    w: Vec<f64>,
    /// `prefix[m]` = total weight of the first `m` examples in `order`.
    prefix: Vec<f64>,
}

/// Canonical order: heavier first, then lower example index.
#[inline]
fn heavier_first(w: &[f64], a: u32, b: u32) -> Ordering {
    w[b as usize]
        .total_cmp(&w[a as usize])
        .then_with(|| a.cmp(&b))
}

impl WeightVector {
    /// Uniform weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateWeights);
        }
        Self::from_weights(vec![1.0 / n as f64; n])
    }

    /// Wraps raw per-example weights; sorts them with a full sort. Does not normalize.
    pub fn from_weights(w: Vec<f64>) -> Result<Self> {
        if let Some(bad) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::arg(format!(
                "weights must be finite and non-negative, got {bad}"
            )));
        }
        let mut order: Vec<u32> = (0..w.len() as u32).collect();
        order.sort_unstable_by(|&a, &b| heavier_first(&w, a, b));
        let mut wv = WeightVector {
            order,
            w,
            prefix: Vec::new(),
        };
        wv.rebuild_prefix();
        Ok(wv)
    }

    fn rebuild_prefix(&mut self) {
        self.prefix.clear();
        self.prefix.reserve(self.order.len() + 1);
        let mut acc = 0.0;
        self.prefix.push(acc);
        for &i in &self.order {
            acc += self.w[i as usize];
            self.prefix.push(acc);
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Example indices, heaviest first.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Weights indexed by example.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn weight(&self, example: usize) -> f64 {
        self.w[example]
    }

    /// Prefix sums `Z_0..=Z_n` along the weight order.
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().unwrap_or(&0.0)
    }

    /// `rank[example]` = position of that example in the weight order.
    pub fn ranks(&self) -> Vec<u32> {
        let mut rank = vec![0u32; self.order.len()];
        for (pos, &i) in self.order.iter().enumerate() {
            rank[i as usize] = pos as u32;
        }
        rank
    }

    /// Divides every weight by the total.
    pub fn normalize(&mut self) -> Result<()> {
        let total = self.total();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        for x in &mut self.w {
            *x /= total;
        }
        // Division is monotone but may merge neighbouring weights.
        self.fix_equal_runs();
        self.rebuild_prefix();
        Ok(())
    }

    /// Smallest `m` with `Z_m >= target`, or `n` if the total falls short.
    pub fn prefix_index(&self, target: f64) -> usize {
        prefix_index(&self.prefix, target)
    }

    /// AdaBoost update `w_i <- w_i * exp(-alpha * y_i * h(x_i))`, then
    /// normalization and an O(n) merge of the correct / incorrect groups.
    ///
    /// Returns the number of weight comparisons spent on reordering.
    pub fn adaboost_update(
        &mut self,
        predictions: &[Label],
        labels: &[Label],
        alpha: f64,
    ) -> Result<usize> {
        if predictions.len() != self.len() || labels.len() != self.len() {
            return Err(Error::arg(
                "prediction / label length differs from weight count",
            ));
        }
        if !alpha.is_finite() {
            return Err(Error::arg("alpha must be finite"));
        }
        let up = alpha.exp();
        let down = (-alpha).exp();
        let correct: Vec<bool> = predictions
            .iter()
            .zip(labels)
            .map(|(h, y)| h == y)
            .collect();
        for (x, &ok) in self.w.iter_mut().zip(&correct) {
            *x *= if ok { down } else { up };
        }
        let total: f64 = self.w.iter().sum();
        if !total.is_finite() || total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        for x in &mut self.w {
            *x /= total;
        }
        Ok(self.merge_reorder(&correct))
    }

    /// Rebuilds the order after a two-factor multiplicative update by merging
    /// the correct and incorrect groups, each of which kept its relative order.
    ///
    /// The result equals a full sort with index tie-break. Returns the number
    /// of weight comparisons performed.
    pub fn merge_reorder(&mut self, correct: &[bool]) -> usize {
        let (good, bad): (Vec<u32>, Vec<u32>) =
            self.order.iter().partition(|&&i| correct[i as usize]);
        let mut comparisons = 0usize;
        let mut merged = Vec::with_capacity(self.order.len());
        let (mut g, mut b) = (0, 0);
        while g < good.len() && b < bad.len() {
            comparisons += 1;
            if heavier_first(&self.w, good[g], bad[b]) == Ordering::Greater {
                merged.push(bad[b]);
                b += 1;
            } else {
                merged.push(good[g]);
                g += 1;
            }
        }
        merged.extend_from_slice(&good[g..]);
        merged.extend_from_slice(&bad[b..]);
        self.order = merged;
        comparisons += self.fix_equal_runs();
        self.rebuild_prefix();
        comparisons
    }

    /// Rounding in a multiplicative update can make two unequal weights equal;
    /// restore index order inside every run of equal weights.
    fn fix_equal_runs(&mut self) -> usize {
        let n = self.order.len();
        let mut comparisons = 0;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            let mut sorted = true;
            while end < n && self.w[self.order[end] as usize] == self.w[self.order[start] as usize]
            {
                comparisons += 1;
                if self.order[end] < self.order[end - 1] {
                    sorted = false;
                }
                end += 1;
            }
            comparisons += usize::from(end < n);
            if !sorted {
                self.order[start..end].sort_unstable();
            }
            start = end;
        }
        comparisons
    }
}

/// Smallest `m` with `prefix[m] >= target`, clamped to `prefix.len() - 1`.
pub(crate) fn prefix_index(prefix: &[f64], target: f64) -> usize {
    let n = prefix.len() - 1;
    if target.is_nan() || target <= 0.0 {
        return 0;
    }
    prefix.partition_point(|&z| z < target).min(n)
}
