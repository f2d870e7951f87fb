//! Incremental assessment of every stump on one feature.
//!
//! A [`FeatureAssessor`] keeps the distinct feature values seen so far, each
//! with the weight of positive and negative examples at that value. The gaps
//! between consecutive values are the threshold intervals: any threshold
//! inside one interval classifies every assessed example identically, so one
//! error tally per (interval, polarity) covers all stumps of the feature.

use std::fmt;

use crate::dataset::Label;
use crate::error::{Error, Result};

/// `h(x) = polarity * sign(x[feature] - threshold)` with `sign(0) = +1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stump {
    pub polarity: i8,
    /// 0-based feature index.
    pub feature: usize,
    pub threshold: f64,
}

impl Stump {
    pub fn new(polarity: i8, feature: usize, threshold: f64) -> Self {
        debug_assert!(polarity == 1 || polarity == -1);
        Stump {
            polarity,
            feature,
            threshold,
        }
    }

    /// Prediction for an example whose value on `self.feature` is `x`.
    #[inline]
    pub fn predict_value(&self, x: f64) -> Label {
        if x >= self.threshold {
            self.polarity
        } else {
            -self.polarity
        }
    }
}

impl fmt::Display for Stump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:+} * sign(x[{}] - {}))",
            self.polarity,
            self.feature + 1,
            self.threshold
        )
    }
}

/// One assessed example as seen by a single feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub value: f64,
    pub label: Label,
    pub weight: f64,
}

/// Snapshot of one threshold interval `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdInterval {
    pub lo: f64,
    pub hi: f64,
    /// Misclassified assessed weight for polarity `+1`.
    pub wrong_weight_pos: f64,
    /// Misclassified assessed weight for polarity `-1`.
    pub wrong_weight_neg: f64,
}

#[derive(Debug, Clone, Copy)]
struct ValueTally {
    value: f64,
    pos: f64,
    neg: f64,
}

#[derive(Debug, Clone)]
pub struct FeatureAssessor {
    feature: usize,
    n: usize,
    zn: f64,
    tallies: Vec<ValueTally>,
    /// Interval `i` lies below `tallies[i]` (and above `tallies[i - 1]`).
    err_pos: Vec<f64>,
    err_neg: Vec<f64>,
    best_eps: f64,
    best_interval: usize,
    best_polarity: i8,
    m_seen: usize,
    zm_seen: f64,
    assess_count: u64,
    fresh: Vec<f64>,
}

impl FeatureAssessor {
    /// A fresh assessor for a node of `n` examples with total weight `zn`.
    pub fn new(feature: usize, n: usize, zn: f64) -> Self {
        FeatureAssessor {
            feature,
            n,
            zn,
            tallies: Vec::new(),
            err_pos: vec![0.0],
            err_neg: vec![0.0],
            best_eps: 0.0,
            best_interval: 0,
            best_polarity: 1,
            m_seen: 0,
            zm_seen: 0.0,
            assess_count: 0,
            fresh: Vec::new(),
        }
    }

    pub fn feature(&self) -> usize {
        self.feature
    }

    pub fn m_seen(&self) -> usize {
        self.m_seen
    }

    pub fn zm_seen(&self) -> f64 {
        self.zm_seen
    }

    pub fn zn(&self) -> f64 {
        self.zn
    }

    pub fn node_size(&self) -> usize {
        self.n
    }

    pub fn assess_count(&self) -> u64 {
        self.assess_count
    }

    pub fn is_complete(&self) -> bool {
        self.m_seen == self.n
    }

    /// Assesses the next run of weight-ordered examples, starting at position
    /// `start` (which must equal the number already assessed).
    pub fn assess(&mut self, start: usize, batch: &[Observation]) -> Result<()> {
        if start != self.m_seen {
            return Err(Error::Contract(format!(
                "batch for feature {} starts at {start} but {} examples are assessed",
                self.feature + 1,
                self.m_seen
            )));
        }
        if start + batch.len() > self.n {
            return Err(Error::Contract(format!(
                "batch for feature {} runs past the node size {}",
                self.feature + 1,
                self.n
            )));
        }
        if batch.is_empty() {
            return Ok(());
        }

        self.fresh.clear();
        for ob in batch {
            if self.find(ob.value).is_err() {
                self.fresh.push(ob.value);
            }
        }
        if !self.fresh.is_empty() {
            self.fresh.sort_unstable_by(f64::total_cmp);
            self.fresh.dedup();
            self.merge_fresh();
        }
        // Tallies are accumulated in weight order whatever the batching, so the
        // final sums do not depend on the schedule.
        for ob in batch {
            let slot = self.find(ob.value).expect("value was merged above");
            let t = &mut self.tallies[slot];
            if ob.label > 0 {
                t.pos += ob.weight;
            } else {
                t.neg += ob.weight;
            }
            self.zm_seen += ob.weight;
        }
        self.m_seen += batch.len();
        self.assess_count += batch.len() as u64;
        self.sweep();
        Ok(())
    }

    fn find(&self, value: f64) -> std::result::Result<usize, usize> {
        self.tallies.binary_search_by(|t| t.value.total_cmp(&value))
    }

    fn merge_fresh(&mut self) {
        let mut merged = Vec::with_capacity(self.tallies.len() + self.fresh.len());
        let (mut a, mut b) = (0, 0);
        while a < self.tallies.len() || b < self.fresh.len() {
            let take_old = b == self.fresh.len()
                || (a < self.tallies.len() && self.tallies[a].value < self.fresh[b]);
            if take_old {
                merged.push(self.tallies[a]);
                a += 1;
            } else {
                merged.push(ValueTally {
                    value: self.fresh[b],
                    pos: 0.0,
                    neg: 0.0,
                });
                b += 1;
            }
        }
        self.tallies = merged;
    }

    /// Recomputes both polarities' errors on every interval and the best stump.
    ///
    /// Errors are built only from sums of non-negative terms (prefix sums from
    /// the left, suffix sums from the right). Rounding is monotone, so assessing
    /// more examples can never lower an interval's error, not even by one ulp:
    /// a partial lower bound never exceeds the exact error of the full pass.
    fn sweep(&mut self) {
        let d = self.tallies.len();
        // err_pos / err_neg first hold the suffix sums of neg / pos weight.
        self.err_pos.clear();
        self.err_neg.clear();
        self.err_pos.resize(d + 1, 0.0);
        self.err_neg.resize(d + 1, 0.0);
        let (mut suf_neg, mut suf_pos) = (0.0, 0.0);
        for i in (0..d).rev() {
            suf_neg += self.tallies[i].neg;
            suf_pos += self.tallies[i].pos;
            self.err_pos[i] = suf_neg;
            self.err_neg[i] = suf_pos;
        }
        let (mut cum_pos, mut cum_neg) = (0.0, 0.0);
        let mut best = (f64::INFINITY, 0, 1);
        for i in 0..=d {
            // p = +1 predicts -1 below the threshold and +1 above it.
            let e_pos = cum_pos + self.err_pos[i];
            let e_neg = cum_neg + self.err_neg[i];
            self.err_pos[i] = e_pos;
            self.err_neg[i] = e_neg;
            if e_pos < best.0 {
                best = (e_pos, i, 1);
            }
            if e_neg < best.0 {
                best = (e_neg, i, -1);
            }
            if i < d {
                cum_pos += self.tallies[i].pos;
                cum_neg += self.tallies[i].neg;
            }
        }
        self.best_eps = best.0;
        self.best_interval = best.1;
        self.best_polarity = best.2;
    }

    /// Smallest misclassified assessed weight over all stumps of the feature.
    pub fn best_wrong_weight(&self) -> f64 {
        self.best_eps
    }

    /// `L_m`: best stump's error assuming unseen examples are all correct.
    pub fn lb(&self) -> f64 {
        self.best_eps / self.zn
    }

    /// `U_m`: best stump's error assuming unseen examples are all wrong.
    pub fn ub(&self) -> f64 {
        if self.is_complete() {
            return self.lb();
        }
        ((self.best_eps + (self.zn - self.zm_seen)) / self.zn).max(self.lb())
    }

    /// `E_m`: best stump's error on the assessed examples alone.
    pub fn error_so_far(&self) -> Result<f64> {
        if self.m_seen == 0 {
            return Err(Error::Contract("no examples assessed yet".into()));
        }
        if self.zm_seen > 0.0 {
            Ok(self.best_eps / self.zm_seen)
        } else {
            Ok(0.0)
        }
    }

    /// The minimal-error stump; ties go to the smaller threshold, then `p = +1`.
    pub fn best_stump(&self) -> Result<Stump> {
        if self.m_seen == 0 {
            return Err(Error::Contract(format!(
                "best stump requested for unassessed feature {}",
                self.feature + 1
            )));
        }
        Ok(Stump::new(
            self.best_polarity,
            self.feature,
            self.interval_threshold(self.best_interval),
        ))
    }

    /// Midpoint of interval `i`; the outer intervals extend one unit past the
    /// extreme values.
    fn interval_threshold(&self, i: usize) -> f64 {
        let d = self.tallies.len();
        if d == 0 {
            return 0.0;
        }
        let lo = if i == 0 {
            self.tallies[0].value - 1.0
        } else {
            self.tallies[i - 1].value
        };
        let hi = if i == d {
            self.tallies[d - 1].value + 1.0
        } else {
            self.tallies[i].value
        };
        lo + (hi - lo) / 2.0
    }

    pub fn intervals(&self) -> Vec<ThresholdInterval> {
        let d = self.tallies.len();
        (0..=d)
            .map(|i| ThresholdInterval {
                lo: if i == 0 {
                    f64::NEG_INFINITY
                } else {
                    self.tallies[i - 1].value
                },
                hi: if i == d {
                    f64::INFINITY
                } else {
                    self.tallies[i].value
                },
                wrong_weight_pos: self.err_pos[i],
                wrong_weight_neg: self.err_neg[i],
            })
            .collect()
    }

    /// Every stump of the feature with its misclassified assessed weight, in
    /// canonical order (ascending threshold, `p = +1` first).
    pub fn stumps(&self) -> Vec<(Stump, f64)> {
        let mut out = Vec::with_capacity(2 * self.err_pos.len());
        for i in 0..self.err_pos.len() {
            let tau = self.interval_threshold(i);
            out.push((Stump::new(1, self.feature, tau), self.err_pos[i]));
            out.push((Stump::new(-1, self.feature, tau), self.err_neg[i]));
        }
        out
    }

    /// Distinct assessed values in ascending order.
    pub fn values(&self) -> Vec<f64> {
        self.tallies.iter().map(|t| t.value).collect()
    }
}
