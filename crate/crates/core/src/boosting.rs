//! Discrete AdaBoost over depth-limited trees, with weight trimming and
//! LazyBoost feature sampling.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, ExampleView, Label};
use crate::error::{Error, Result};
use crate::search::Strategy;
use crate::tree::{train_tree_observed, NodeObserver, TreeNode};
use crate::weights::WeightVector;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ensemble {
    pub rounds: Vec<(f64, TreeNode)>,
}

impl Ensemble {
    pub fn new() -> Self {
        Ensemble::default()
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn push(&mut self, alpha: f64, tree: TreeNode) -> Result<()> {
        if !alpha.is_finite() {
            return Err(Error::arg("alpha must be finite"));
        }
        self.rounds.push((alpha, tree));
        Ok(())
    }

    /// `sum_t alpha_t h_t(x)` for a value accessor.
    pub fn score_with(&self, value: impl Fn(usize) -> f64) -> f64 {
        self.rounds
            .iter()
            .map(|(a, t)| a * f64::from(t.predict_with(&value)))
            .sum()
    }

    /// Sign of the score; zero maps to `+1`.
    pub fn predict_with(&self, value: impl Fn(usize) -> f64) -> Label {
        sign(self.score_with(value))
    }

    pub fn predict(&self, data: &Dataset, i: usize) -> Label {
        self.predict_with(|k| data.value(i, k))
    }

    /// Unweighted fraction of `data` misclassified.
    pub fn error_rate(&self, data: &Dataset) -> f64 {
        let wrong = (0..data.len())
            .filter(|&i| self.predict(data, i) != data.label(i))
            .count();
        wrong as f64 / data.len() as f64
    }
}

#[inline]
fn sign(x: f64) -> Label {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Per-round training restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    None,
    /// Train on a random `q` fraction of the features.
    Lazy(f64),
    /// Train on the heaviest examples covering a `q` fraction of the weight.
    Trim(f64),
}

impl Variant {
    fn validate(&self) -> Result<()> {
        match *self {
            Variant::None => Ok(()),
            Variant::Lazy(q) | Variant::Trim(q) if q > 0.0 && q <= 1.0 => Ok(()),
            _ => Err(Error::arg("variant fraction must lie in (0, 1]")),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Variant::None => "none".into(),
            Variant::Lazy(q) => format!("lazy={q}"),
            Variant::Trim(q) => format!("trim={q}"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_q = |q: &str| -> Result<f64> {
            q.parse()
                .map_err(|_| Error::arg(format!("bad variant fraction '{q}'")))
        };
        let v = match s.split_once('=') {
            None if s == "none" => Variant::None,
            Some(("lazy", q)) => Variant::Lazy(parse_q(q)?),
            Some(("trim", q)) => Variant::Trim(parse_q(q)?),
            _ => return Err(Error::arg(format!("unknown variant '{s}'"))),
        };
        v.validate()?;
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostConfig {
    pub rounds: usize,
    pub depth: usize,
    pub strategy: Strategy,
    pub variant: Variant,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundMetrics {
    /// 1-based.
    pub round: usize,
    pub assessments: u64,
    pub cumulative: u64,
    pub train_error: f64,
    pub test_error: Option<f64>,
    pub wall: Duration,
    pub epsilon: f64,
    pub alpha: f64,
    pub lb_wo: Option<u64>,
    pub lb_exact: Option<u64>,
    /// `lb_exact` hit its node budget; the value is a partial bound.
    pub lb_exact_timed_out: bool,
}

/// Stateful AdaBoost driver, one round per [`Booster::step`].
pub struct Booster<'a> {
    train: &'a Dataset,
    test: Option<&'a Dataset>,
    cfg: BoostConfig,
    wv: WeightVector,
    ensemble: Ensemble,
    train_margin: Vec<f64>,
    test_margin: Vec<f64>,
    cumulative: u64,
}

impl<'a> Booster<'a> {
    pub fn new(train: &'a Dataset, test: Option<&'a Dataset>, cfg: BoostConfig) -> Result<Self> {
        if cfg.depth == 0 {
            return Err(Error::arg("depth must be at least 1"));
        }
        cfg.variant.validate()?;
        Ok(Booster {
            train,
            test,
            cfg,
            wv: WeightVector::uniform(train.len())?,
            ensemble: Ensemble::new(),
            train_margin: vec![0.0; train.len()],
            test_margin: vec![0.0; test.map_or(0, |t| t.len())],
            cumulative: 0,
        })
    }

    pub fn weights(&self) -> &WeightVector {
        &self.wv
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn into_ensemble(self) -> Ensemble {
        self.ensemble
    }

    pub fn round(&self) -> usize {
        self.ensemble.len()
    }

    pub fn config(&self) -> &BoostConfig {
        &self.cfg
    }

    /// Features searched in round `round` (1-based); `None` means all.
    pub fn round_features(&self, round: usize) -> Option<Vec<usize>> {
        let Variant::Lazy(q) = self.cfg.variant else {
            return None;
        };
        let k = self.train.n_features();
        let take = ((q * k as f64) - 1e-9).ceil().max(1.0) as usize;
        if take >= k {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(round as u64);
        let mut picked = rand::seq::index::sample(&mut rng, k, take).into_vec();
        picked.sort_unstable();
        Some(picked)
    }

    /// Training view of the current round.
    pub fn round_view(&self) -> ExampleView<'a> {
        match self.cfg.variant {
            Variant::Trim(q) if q < 1.0 => {
                let m = self.wv.prefix_index(q * self.wv.total()).max(1);
                ExampleView::new_unchecked(self.train, self.wv.order()[..m].to_vec())
            }
            _ => ExampleView::full(self.train),
        }
    }

    /// Runs one round.
    pub fn step(&mut self) -> Result<RoundMetrics> {
        self.step_observed(&mut |_, _| Ok(()))
    }

    /// Runs one round, calling `observer` at every split node. Time spent in
    /// the observer is excluded from the reported wall time.
    pub fn step_observed(&mut self, observer: &mut NodeObserver<'_>) -> Result<RoundMetrics> {
        let start = Instant::now();
        let round = self.ensemble.len() + 1;
        let features = self.round_features(round);
        let view = self.round_view();

        let mut outside = Duration::ZERO;
        let mut timed = |node: &crate::search::Node, found: &crate::search::SearchResult| {
            let t = Instant::now();
            let r = observer(node, found);
            outside += t.elapsed();
            r
        };
        let (tree, assessments) = train_tree_observed(
            &view,
            &self.wv,
            self.cfg.depth,
            self.cfg.strategy,
            features.as_deref(),
            &mut timed,
        )?;

        let n = self.train.len();
        let preds: Vec<Label> = (0..n).map(|i| tree.predict(self.train, i)).collect();
        let labels = self.train.labels();
        let wrong: f64 = (0..n)
            .filter(|&i| preds[i] != labels[i])
            .map(|i| self.wv.weight(i))
            .sum();
        let raw_eps = wrong / self.wv.total();
        let floor = 1.0 / (2.0 * n as f64);
        let epsilon = raw_eps.clamp(floor, 1.0 - floor);
        let alpha = 0.5 * ((1.0 - epsilon) / epsilon).ln();

        self.wv.adaboost_update(&preds, labels, alpha)?;

        let mut train_wrong = 0;
        for i in 0..n {
            self.train_margin[i] += alpha * f64::from(preds[i]);
            if sign(self.train_margin[i]) != labels[i] {
                train_wrong += 1;
            }
        }
        let test_error = self.test.map(|t| {
            let mut wrong = 0;
            for i in 0..t.len() {
                self.test_margin[i] += alpha * f64::from(tree.predict(t, i));
                if sign(self.test_margin[i]) != t.label(i) {
                    wrong += 1;
                }
            }
            wrong as f64 / t.len() as f64
        });
        self.ensemble.push(alpha, tree)?;
        self.cumulative += assessments;

        Ok(RoundMetrics {
            round,
            assessments,
            cumulative: self.cumulative,
            train_error: train_wrong as f64 / n as f64,
            test_error,
            wall: start.elapsed().saturating_sub(outside),
            epsilon: raw_eps,
            alpha,
            lb_wo: None,
            lb_exact: None,
            lb_exact_timed_out: false,
        })
    }
}

/// Runs `cfg.rounds` rounds of AdaBoost.
pub fn adaboost(
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: BoostConfig,
) -> Result<(Ensemble, Vec<RoundMetrics>)> {
    if cfg.rounds == 0 {
        return Err(Error::arg("at least one boosting round is required"));
    }
    let mut booster = Booster::new(train, test, cfg)?;
    let mut metrics = Vec::with_capacity(cfg.rounds);
    for _ in 0..cfg.rounds {
        metrics.push(booster.step()?);
    }
    Ok((booster.into_ensemble(), metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_svmlight;

    fn cfg(strategy: Strategy) -> BoostConfig {
        BoostConfig {
            rounds: 5,
            depth: 1,
            strategy,
            variant: Variant::None,
            seed: 1,
        }
    }

    #[test]
    fn empty_ensemble_predicts_positive() {
        let d = parse_svmlight("-1 1:1".as_bytes(), None).unwrap();
        assert_eq!(Ensemble::new().predict(&d, 0), 1);
        assert_eq!(Ensemble::new().error_rate(&d), 1.0);
    }

    #[test]
    fn separable_data_reaches_zero_error() {
        let d = parse_svmlight("1 1:1\n1 1:2\n-1 1:3\n-1 1:4".as_bytes(), None).unwrap();
        let (e, m) = adaboost(&d, Some(&d), cfg(Strategy::Adaptive)).unwrap();
        assert_eq!(m[0].train_error, 0.0);
        assert_eq!(m[0].test_error, Some(0.0));
        assert!(e.rounds.iter().all(|(a, _)| a.is_finite() && *a > 0.0));
        // clamped at 1/(2n)
        assert!((e.rounds[0].0 - 0.5 * 7f64.ln()).abs() < 1e-12);
        assert_eq!(e.error_rate(&d), 0.0);
    }

    #[test]
    fn single_round_matches_tree() {
        let d = parse_svmlight("1 1:1\n-1 1:2\n1 1:3\n-1 2:4".as_bytes(), None).unwrap();
        let mut c = cfg(Strategy::Exhaustive);
        c.rounds = 1;
        let (e, _) = adaboost(&d, None, c).unwrap();
        for i in 0..d.len() {
            assert_eq!(e.predict(&d, i), e.rounds[0].1.predict(&d, i));
        }
    }

    #[test]
    fn zero_rounds_rejected() {
        let d = parse_svmlight("1 1:1\n-1 1:2".as_bytes(), None).unwrap();
        let mut c = cfg(Strategy::Adaptive);
        c.rounds = 0;
        assert!(adaboost(&d, None, c).is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("none".parse::<Variant>().unwrap(), Variant::None);
        assert_eq!("lazy=0.5".parse::<Variant>().unwrap(), Variant::Lazy(0.5));
        assert_eq!("trim=0.99".parse::<Variant>().unwrap(), Variant::Trim(0.99));
        for bad in ["lazy=0", "trim=1.5", "lazy", "foo=0.5", "trim=x"] {
            assert!(bad.parse::<Variant>().is_err(), "{bad}");
        }
    }
}
