//! Instrumented boosting runs and their CSV outputs.

use std::path::PathBuf;
use std::time::Duration;

use crate::boosting::{BoostConfig, Booster, Ensemble, RoundMetrics, Variant};
use crate::dataset::{Dataset, ExampleView};
use crate::error::{Error, Result};
use crate::lower_bounds::{exact_lb_node, weight_order_lb_node, DEFAULT_NODE_BUDGET};
use crate::search::{search_node, Node, QuickBoostParams, Strategy};

pub const DEFAULT_LB_EXACT_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbMode {
    None,
    Wo,
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: PathBuf,
    pub test: Option<PathBuf>,
    pub rounds: usize,
    pub depth: usize,
    pub strategy: Strategy,
    pub variant: Variant,
    pub seed: u64,
    pub lb: LbMode,
    /// Largest training set on which `LbMode::Exact` is allowed.
    pub lb_exact_cap: usize,
    pub node_budget: u64,
}

impl ExperimentConfig {
    pub fn new(data: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            data: data.into(),
            test: None,
            rounds: 100,
            depth: 1,
            strategy: Strategy::Adaptive,
            variant: Variant::None,
            seed: 0,
            lb: LbMode::None,
            lb_exact_cap: DEFAULT_LB_EXACT_CAP,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn boost_config(&self) -> BoostConfig {
        BoostConfig {
            rounds: self.rounds,
            depth: self.depth,
            strategy: self.strategy,
            variant: self.variant,
            seed: self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 || self.depth == 0 {
            return Err(Error::arg("rounds and depth must be at least 1"));
        }
        if self.lb == LbMode::Exact && self.depth != 1 {
            return Err(Error::arg(
                "the exact lower bound is only available for depth 1",
            ));
        }
        Ok(())
    }

    pub fn load(&self) -> Result<(Dataset, Option<Dataset>)> {
        let train = Dataset::load(&self.data, None)?;
        let test = match &self.test {
            Some(p) => Some(Dataset::load(p, Some(train.n_features()))?),
            None => None,
        };
        Ok((train, test))
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub ensemble: Ensemble,
    pub metrics: Vec<RoundMetrics>,
    /// Rounds whose exact bound ran out of budget.
    pub timeouts: Vec<usize>,
}

/// Boosts on in-memory data, annotating rounds with the requested bounds.
///
/// Bounds are summed over the split nodes of each round's tree. Every node is
/// also checked against `lb_wo <= assessments`.
pub fn run_boosting(
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &ExperimentConfig,
) -> Result<ExperimentRun> {
    cfg.validate()?;
    if cfg.lb == LbMode::Exact && train.len() > cfg.lb_exact_cap {
        return Err(Error::arg(format!(
            "exact lower bound refused: {} examples exceed the cap of {}",
            train.len(),
            cfg.lb_exact_cap
        )));
    }
    let mut booster = Booster::new(train, test, cfg.boost_config())?;
    let mut metrics = Vec::with_capacity(cfg.rounds);
    let mut timeouts = Vec::new();
    for round in 1..=cfg.rounds {
        let mut wo = 0u64;
        let mut exact = 0u64;
        let mut timed_out = false;
        let mut observe = |node: &Node, found: &crate::search::SearchResult| -> Result<()> {
            if cfg.lb == LbMode::None {
                return Ok(());
            }
            let lb = weight_order_lb_node(node);
            if lb.total > found.assessments {
                return Err(Error::OracleMismatch(format!(
                    "search spent {} assessments, below the weight-order bound {}",
                    found.assessments, lb.total
                )));
            }
            wo += lb.total;
            if cfg.lb == LbMode::Exact {
                match exact_lb_node(node, cfg.node_budget) {
                    Ok(e) => exact += e.total,
                    Err(Error::BoundTimeout { partial }) => {
                        timed_out = true;
                        exact += partial;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(())
        };
        let mut m = booster.step_observed(&mut observe)?;
        if cfg.lb != LbMode::None {
            m.lb_wo = Some(wo);
        }
        if cfg.lb == LbMode::Exact {
            m.lb_exact = Some(exact);
            m.lb_exact_timed_out = timed_out;
            if timed_out {
                timeouts.push(round);
            }
        }
        metrics.push(m);
    }
    Ok(ExperimentRun {
        ensemble: booster.into_ensemble(),
        metrics,
        timeouts,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    cfg.validate()?;
    let (train, test) = cfg.load()?;
    run_boosting(&train, test.as_ref(), cfg)
}

pub const METRICS_HEADER: [&str; 11] = [
    "round",
    "strategy",
    "variant",
    "depth",
    "assess_round",
    "assess_cum",
    "train_err",
    "test_err",
    "wall_ms",
    "lb_wo",
    "lb_exact",
];

fn wall_ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

/// Per-round CSV. Timed-out exact bounds are written as `-1`.
pub fn metrics_csv(cfg: &ExperimentConfig, metrics: &[RoundMetrics]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(METRICS_HEADER)?;
    for m in metrics {
        let lb_exact = match (m.lb_exact, m.lb_exact_timed_out) {
            (_, true) => "-1".to_string(),
            (Some(v), false) => v.to_string(),
            (None, false) => String::new(),
        };
        w.write_record([
            m.round.to_string(),
            cfg.strategy.name().to_string(),
            cfg.variant.label(),
            cfg.depth.to_string(),
            m.assessments.to_string(),
            m.cumulative.to_string(),
            m.train_error.to_string(),
            m.test_error.map(|e| e.to_string()).unwrap_or_default(),
            wall_ms(m.wall),
            m.lb_wo.map(|v| v.to_string()).unwrap_or_default(),
            lb_exact,
        ])?;
    }
    csv_string(w)
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub label: String,
    pub assessments: u64,
    pub wall: Duration,
    /// `1 - candidate / this`, for assessments and wall time.
    pub assess_improvement: f64,
    pub time_improvement: f64,
}

/// Runs every config and compares each against the first (the candidate).
pub fn compare(cfgs: &[ExperimentConfig]) -> Result<Vec<CompareRow>> {
    let Some(first) = cfgs.first() else {
        return Err(Error::arg("nothing to compare"));
    };
    for c in cfgs {
        if c.data != first.data
            || c.test != first.test
            || c.rounds != first.rounds
            || c.depth != first.depth
        {
            return Err(Error::arg(
                "compared runs must share dataset, rounds and depth",
            ));
        }
    }
    let (train, test) = first.load()?;
    let mut runs = Vec::with_capacity(cfgs.len());
    for c in cfgs {
        let run = run_boosting(&train, test.as_ref(), c)?;
        let assessments = run.metrics.last().map_or(0, |m| m.cumulative);
        let wall = run.metrics.iter().map(|m| m.wall).sum();
        runs.push((c, assessments, wall));
    }
    Ok(compare_rows(&runs))
}

fn compare_rows(runs: &[(&ExperimentConfig, u64, Duration)]) -> Vec<CompareRow> {
    let (_, cand_a, cand_t) = runs[0];
    let improvement = |cand: f64, base: f64| if base > 0.0 { 1.0 - cand / base } else { 0.0 };
    runs.iter()
        .map(|(c, a, t)| CompareRow {
            label: run_label(c),
            assessments: *a,
            wall: *t,
            assess_improvement: improvement(cand_a as f64, *a as f64),
            time_improvement: improvement(cand_t.as_secs_f64(), t.as_secs_f64()),
        })
        .collect()
}

fn run_label(c: &ExperimentConfig) -> String {
    match c.variant {
        Variant::None => c.strategy.name().to_string(),
        v => format!("{}+{}", c.strategy.name(), v.label()),
    }
}

pub fn compare_table(rows: &[CompareRow]) -> String {
    let mut out = format!(
        "{:<20} {:>16} {:>12} {:>13} {:>12}\n",
        "run", "assessments", "wall_ms", "assess_improv", "time_improv"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<20} {:>16} {:>12} {:>12.2}% {:>11.2}%\n",
            r.label,
            r.assessments,
            wall_ms(r.wall),
            100.0 * r.assess_improvement,
            100.0 * r.time_improvement
        ));
    }
    out
}

pub fn compare_csv(rows: &[CompareRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "run",
        "assessments",
        "wall_ms",
        "assess_improv",
        "time_improv",
    ])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.assessments.to_string(),
            wall_ms(r.wall),
            r.assess_improvement.to_string(),
            r.time_improvement.to_string(),
        ])?;
    }
    csv_string(w)
}

/// One round of the lower-bound study (depth 1, full view).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub round: usize,
    pub n: usize,
    /// `n * K`, the cost of exhaustive search.
    pub total: u64,
    /// `Err(partial)` when the node budget ran out.
    pub lb_exact: Option<std::result::Result<u64, u64>>,
    pub lb_wo: u64,
    pub ap: u64,
    pub qb: u64,
    pub classic: u64,
}

/// Depth-1 boosting where every round's root node is searched by all three
/// strategies and annotated with both bounds. Weights advance with the
/// (shared) selected stump.
pub fn lower_bound_study(
    train: &Dataset,
    rounds: usize,
    qb: QuickBoostParams,
    exact: bool,
    node_budget: u64,
) -> Result<Vec<BoundRow>> {
    if rounds == 0 {
        return Err(Error::arg("at least one round is required"));
    }
    let cfg = BoostConfig {
        rounds,
        depth: 1,
        strategy: Strategy::Adaptive,
        variant: Variant::None,
        seed: 0,
    };
    let mut booster = Booster::new(train, None, cfg)?;
    let mut rows = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let node = Node::new(&ExampleView::full(train), booster.weights(), None)?;
        let ap = search_node(&node, Strategy::Adaptive)?;
        let q = search_node(&node, Strategy::QuickBoost(qb))?;
        let classic = search_node(&node, Strategy::Exhaustive)?;
        if ap.stump != classic.stump || q.stump != classic.stump {
            return Err(Error::OracleMismatch(format!(
                "round {round}: strategies disagree ({}, {}, {})",
                ap.stump, q.stump, classic.stump
            )));
        }
        let wo = weight_order_lb_node(&node);
        let lb_exact = exact.then(|| match exact_lb_node(&node, node_budget) {
            Ok(e) => Ok(Ok(e.total)),
            Err(Error::BoundTimeout { partial }) => Ok(Err(partial)),
            Err(e) => Err(e),
        });
        let lb_exact = lb_exact.transpose()?;
        rows.push(BoundRow {
            round,
            n: node.len(),
            total: (node.len() * node.features().len()) as u64,
            lb_exact,
            lb_wo: wo.total,
            ap: ap.assessments,
            qb: q.assessments,
            classic: classic.assessments,
        });
        booster.step()?;
    }
    Ok(rows)
}

pub fn bound_csv(rows: &[BoundRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "round", "n", "total", "lb_exact", "lb_wo", "ap", "qb", "classic",
    ])?;
    for r in rows {
        let exact = match r.lb_exact {
            None => String::new(),
            Some(Ok(v)) => v.to_string(),
            Some(Err(_)) => "-1".into(),
        };
        w.write_record([
            r.round.to_string(),
            r.n.to_string(),
            r.total.to_string(),
            exact,
            r.lb_wo.to_string(),
            r.ap.to_string(),
            r.qb.to_string(),
            r.classic.to_string(),
        ])?;
    }
    csv_string(w)
}

/// Position of `x` in the gap between the exact bound and exhaustive cost.
pub fn gap_fraction(x: f64, lb_exact: f64, total: f64) -> Option<f64> {
    let span = total - lb_exact;
    (span > 0.0).then(|| (x - lb_exact) / span)
}

/// Maps a lower-bound study CSV to gap fractions per round. Rounds without a
/// usable exact bound are skipped.
pub fn gapplot_csv(input: &str) -> Result<String> {
    let mut r = csv::Reader::from_reader(input.as_bytes());
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::arg(format!("input lacks column '{name}'")))
    };
    let round = col("round")?;
    let total = col("total")?;
    let exact = col("lb_exact")?;
    let series = ["lb_wo", "ap", "qb", "classic"];
    let idx: Vec<usize> = series.iter().map(|s| col(s)).collect::<Result<_>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["round"];
    head.extend(series);
    w.write_record(&head)?;
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<Option<f64>> {
            let s = rec.get(i).unwrap_or("").trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| Error::arg(format!("non-numeric field '{s}'")))
        };
        let (Some(lb), Some(tot)) = (num(exact)?, num(total)?) else {
            continue;
        };
        if lb < 0.0 {
            continue;
        }
        let mut out = vec![rec.get(round).unwrap_or("").to_string()];
        let mut usable = true;
        for &i in &idx {
            match num(i)?.and_then(|x| gap_fraction(x, lb, tot)) {
                Some(g) => out.push(g.to_string()),
                None => usable = false,
            }
        }
        if usable {
            w.write_record(&out)?;
        }
    }
    csv_string(w)
}
