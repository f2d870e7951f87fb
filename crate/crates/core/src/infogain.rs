//! Interval bounds on weighted conditional entropy when only part of the
//! examples have been assessed. All logarithms are base 2.
//!
//! A leaf has seen weight `Z_u` split by label into `Z_u^y`. The unseen
//! examples carry total weight `w` (`w^y` per label) and may land in any leaf.

use crate::error::{Error, Result};

/// Seen weight of one leaf, per label.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafTally {
    pub by_label: Vec<f64>,
}

impl LeafTally {
    pub fn new(by_label: Vec<f64>) -> Result<Self> {
        check_weights(&by_label)?;
        Ok(LeafTally { by_label })
    }

    pub fn total(&self) -> f64 {
        self.by_label.iter().sum()
    }

    pub fn labels(&self) -> usize {
        self.by_label.len()
    }
}

/// Unseen weight per label; the leaf assignment is unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct UnseenTally {
    pub by_label: Vec<f64>,
}

impl UnseenTally {
    pub fn new(by_label: Vec<f64>) -> Result<Self> {
        check_weights(&by_label)?;
        Ok(UnseenTally { by_label })
    }

    pub fn none(labels: usize) -> Self {
        UnseenTally {
            by_label: vec![0.0; labels],
        }
    }

    pub fn total(&self) -> f64 {
        self.by_label.iter().sum()
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.len() < 2 {
        return Err(Error::arg("need at least two labels"));
    }
    if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::arg("weights must be finite and non-negative"));
    }
    Ok(())
}

/// `x lg(x / y)` with `0 lg(0 / y) = 0`.
fn xlog(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (x / y).log2()
    }
}

/// Bernoulli KL divergence `KL(B(p) || B(q))` in bits.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
        return Err(Error::arg("probabilities must lie in [0, 1]"));
    }
    if (q == 0.0 || q == 1.0) && p != q {
        return Err(Error::InfiniteDivergence);
    }
    let d = xlog(p, q) + xlog(1.0 - p, 1.0 - q);
    Ok(d.max(0.0))
}

/// Weighted entropy `Z * H(counts / Z)` of one tally.
pub fn weighted_entropy(counts: &[f64]) -> f64 {
    let z: f64 = counts.iter().sum();
    if z <= 0.0 {
        return 0.0;
    }
    -counts.iter().map(|&c| xlog(c, z)).sum::<f64>()
}

/// Bounds on `Z_rho * eps_rho` for one leaf whose final contents are the seen
/// tally plus an unknown part of `unseen`.
pub fn leaf_entropy_interval(seen: &LeafTally, unseen: &UnseenTally) -> Result<(f64, f64)> {
    if seen.labels() != unseen.by_label.len() {
        return Err(Error::arg(
            "seen and unseen tallies disagree on the label count",
        ));
    }
    let zu = seen.total();
    let w = unseen.total();
    let lower = weighted_entropy(&seen.by_label);
    let lg_y = (seen.labels() as f64).log2();
    let trivial = (zu + w) * lg_y;
    if w == 0.0 {
        return Ok((lower, lower));
    }
    let mut kl_terms = 0.0;
    let mut diverges = false;
    for (&zy, &wy) in seen.by_label.iter().zip(&unseen.by_label) {
        if zy == 0.0 {
            if wy > 0.0 {
                diverges = true;
            }
            continue;
        }
        kl_terms += (zy + wy) * ((zu + w) / zy).log2();
    }
    let upper = if diverges {
        trivial
    } else {
        (lower + w * lg_y + kl_terms).min(trivial)
    };
    Ok((lower, upper.max(lower)))
}

/// Bounds on the conditional entropy `Z_n * eps_n` over all leaves, with `w`
/// the unseen weight of the whole node.
pub fn conditional_entropy_interval(
    leaves: &[LeafTally],
    unseen: &UnseenTally,
) -> Result<(f64, f64)> {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for leaf in leaves {
        let (l, h) = leaf_entropy_interval(leaf, unseen)?;
        lo += l;
        hi += h;
    }
    Ok((lo, hi))
}

/// Residual of the identity
/// `(a+b) lg((a+b)/(alpha+beta)) = a lg(a/alpha) + b lg(b/beta) - (a+b) KL(a/(a+b) || alpha/(alpha+beta))`.
pub fn check_lemma_kl(a: f64, b: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0 && alpha > 0.0 && beta > 0.0 && a + b > 0.0) {
        return Err(Error::arg("need a, b >= 0, a + b > 0 and alpha, beta > 0"));
    }
    let s = a + b;
    let lhs = xlog(s, alpha + beta);
    let kl = kl_bernoulli(a / s, alpha / (alpha + beta))?;
    let rhs = xlog(a, alpha) + xlog(b, beta) - s * kl;
    Ok((lhs - rhs).abs())
}

/// Margin of `KL(B(Z_u^y / Z_rho^y) || B(Z_u / Z_rho)) <= lg((Z_u + w) / Z_u^y)`.
///
/// Besides `0 < Z_u^y <= Z_u <= Z_rho`, `Z_u^y <= Z_rho^y <= Z_rho` and
/// `Z_rho - Z_u <= w`, the unseen part of label `y` must fit in the unseen
/// part of the leaf: `Z_rho^y - Z_u^y <= Z_rho - Z_u`. Without it the
/// divergence can exceed the bound.
pub fn check_kl_upper_bound(zuy: f64, zry: f64, zu: f64, zr: f64, w: f64) -> Result<f64> {
    let slack = 1e-12 * zr.max(1.0);
    let ok = zuy > 0.0
        && zuy <= zu
        && zu <= zr
        && zuy <= zry
        && zry <= zr
        && zr - zu <= w + slack
        && (zry - zuy) <= (zr - zu) + slack
        && [zuy, zry, zu, zr, w].iter().all(|x| x.is_finite());
    if !ok {
        return Err(Error::arg("KL upper bound preconditions violated"));
    }
    let p = (zuy / zry).min(1.0);
    let q = (zu / zr).min(1.0);
    let kl = kl_bernoulli(p, q)?;
    Ok(((zu + w) / zuy).log2() - kl)
}
