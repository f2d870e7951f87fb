//! Depth-limited binary decision trees grown one node at a time by stump search.

use crate::assessor::Stump;
use crate::dataset::{Dataset, ExampleView, Label};
use crate::error::{Error, Result};
use crate::search::{search_node, Node, SearchResult, Strategy};
use crate::weights::WeightVector;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        label: Label,
    },
    /// `left` receives examples the stump labels `+1`, `right` those it labels `-1`.
    Split {
        stump: Stump,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    /// Prediction for an example whose feature `k` has value `value(k)`.
    pub fn predict_with(&self, value: impl Fn(usize) -> f64) -> Label {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { label } => return *label,
                TreeNode::Split { stump, left, right } => {
                    node = if stump.predict_value(value(stump.feature)) > 0 {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }

    /// Prediction for example `i` of `data`.
    pub fn predict(&self, data: &Dataset, i: usize) -> Label {
        self.predict_with(|k| data.value(i, k))
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Number of internal nodes.
    pub fn splits(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.splits() + right.splits(),
        }
    }

    /// Largest 0-based feature index used by any split.
    pub fn max_feature(&self) -> Option<usize> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split { stump, left, right } => Some(
                stump
                    .feature
                    .max(left.max_feature().unwrap_or(0))
                    .max(right.max_feature().unwrap_or(0)),
            ),
        }
    }
}

/// Called once per split node with the node and its search outcome.
pub type NodeObserver<'o> = dyn FnMut(&Node, &SearchResult) -> Result<()> + 'o;

/// Grows a tree of at most `depth` levels on `view`.
///
/// Returns the tree and the number of assessments spent over all nodes.
pub fn train_tree(
    view: &ExampleView<'_>,
    wv: &WeightVector,
    depth: usize,
    strategy: Strategy,
    features: Option<&[usize]>,
) -> Result<(TreeNode, u64)> {
    train_tree_observed(view, wv, depth, strategy, features, &mut |_, _| Ok(()))
}

pub fn train_tree_observed(
    view: &ExampleView<'_>,
    wv: &WeightVector,
    depth: usize,
    strategy: Strategy,
    features: Option<&[usize]>,
    observer: &mut NodeObserver<'_>,
) -> Result<(TreeNode, u64)> {
    if depth == 0 {
        return Err(Error::arg("tree depth must be at least 1"));
    }
    if view.is_empty() {
        return Err(Error::arg("cannot train a tree on an empty view"));
    }
    let mut assessments = 0;
    let tree = grow(
        view,
        wv,
        depth,
        strategy,
        features,
        1,
        observer,
        &mut assessments,
    )?;
    Ok((tree, assessments))
}

#[allow(clippy::too_many_arguments)]
fn grow(
    view: &ExampleView<'_>,
    wv: &WeightVector,
    depth: usize,
    strategy: Strategy,
    features: Option<&[usize]>,
    fallback: Label,
    observer: &mut NodeObserver<'_>,
    assessments: &mut u64,
) -> Result<TreeNode> {
    let data = view.base();
    let label = majority(view, wv, fallback);
    let first = data.label(view.members()[0] as usize);
    let pure = view
        .members()
        .iter()
        .all(|&i| data.label(i as usize) == first);
    if depth == 0 || pure {
        return Ok(TreeNode::Leaf { label });
    }
    let node = Node::new(view, wv, features)?;
    let found = search_node(&node, strategy)?;
    *assessments += found.assessments;
    observer(&node, &found)?;
    drop(node);

    let stump = found.stump;
    let (pos, neg) = view.split(&stump)?;
    let mut child = |v: &ExampleView<'_>, side: Label| -> Result<TreeNode> {
        let weight: f64 = v.members().iter().map(|&i| wv.weight(i as usize)).sum();
        if v.is_empty() || weight.is_nan() || weight <= 0.0 {
            Ok(TreeNode::Leaf { label: side })
        } else {
            grow(
                v,
                wv,
                depth - 1,
                strategy,
                features,
                side,
                observer,
                assessments,
            )
        }
    };
    let left = child(&pos, 1)?;
    let right = child(&neg, -1)?;
    Ok(TreeNode::Split {
        stump,
        left: Box::new(left),
        right: Box::new(right),
    })
}

/// Weighted-majority label of the view; exact ties go to `fallback`.
fn majority(view: &ExampleView<'_>, wv: &WeightVector, fallback: Label) -> Label {
    let data = view.base();
    let (mut pos, mut neg) = (0.0, 0.0);
    for &i in view.members() {
        let w = wv.weight(i as usize);
        if data.label(i as usize) > 0 {
            pos += w;
        } else {
            neg += w;
        }
    }
    if pos > neg {
        1
    } else if neg > pos {
        -1
    } else {
        fallback
    }
}
