//! Boosted decision trees with adaptive-pruning split search.
//!
//! The crate covers the full training loop (weights, split search, trees,
//! AdaBoost and its trimmed / lazy variants), lower bounds on the number of
//! assessments any correct pruning search must spend, information-gain
//! interval bounds, and the experiment drivers behind the `apboost` binary.

pub mod assessor;
pub mod boosting;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod infogain;
pub mod lower_bounds;
pub mod model_io;
pub mod search;
pub mod synthetic;
pub mod tree;
pub mod weights;

pub use assessor::{FeatureAssessor, Observation, Stump, ThresholdInterval};
pub use boosting::{adaboost, BoostConfig, Booster, Ensemble, RoundMetrics, Variant};
pub use dataset::{parse_svmlight, Dataset, ExampleView, Label};
pub use error::{Error, Result};
pub use lower_bounds::{
    exact_lb, min_cover, min_prune_set, weight_order_lb, Cover, ExactLb, WeightOrderLb,
};
pub use model_io::{load_ensemble, parse_ensemble, save_ensemble, write_ensemble};
pub use search::{
    adaptive_pruning_stump, exhaustive_stump, find_stump, quick_boost_stump, search_node, Node,
    PruneEvent, QuickBoostParams, SearchResult, Strategy, TIE_TOLERANCE,
};
pub use tree::{train_tree, TreeNode};
pub use weights::WeightVector;
