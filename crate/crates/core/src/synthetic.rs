//! Seeded synthetic binary classification data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub n: usize,
    pub features: usize,
    /// Features carry integer values `0..levels`; `None` gives continuous
    /// values in `[0, 1)` rounded to 1e-3.
    pub levels: Option<u32>,
    /// How many leading features enter the labelling rule.
    pub informative: usize,
    /// Half-width of the uniform noise added to the score.
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(n: usize, features: usize, seed: u64) -> Self {
        SyntheticSpec {
            n,
            features,
            levels: None,
            informative: features.min(5),
            noise: 0.5,
            seed,
        }
    }

    pub fn levels(mut self, levels: u32) -> Self {
        self.levels = Some(levels);
        self
    }

    pub fn noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn informative(mut self, informative: usize) -> Self {
        self.informative = informative;
        self
    }
}

/// Labels follow the sign of a random linear score of the informative
/// features plus uniform noise. Zero values are stored implicitly.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.n == 0 || spec.features == 0 {
        return Err(Error::arg(
            "synthetic data needs n >= 1 and at least one feature",
        ));
    }
    if spec.levels == Some(0) || spec.informative > spec.features {
        return Err(Error::arg("bad synthetic level or informative count"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let coef: Vec<f64> = (0..spec.informative)
        .map(|_| {
            let c: f64 = rng.gen_range(0.5..1.5);
            if rng.gen_bool(0.5) {
                c
            } else {
                -c
            }
        })
        .collect();
    let mid = match spec.levels {
        Some(l) => (l as f64 - 1.0) / 2.0,
        None => 0.5,
    };
    let scale = match spec.levels {
        Some(l) if l > 1 => 1.0 / (l as f64 - 1.0),
        _ => 1.0,
    };
    let mut labels = Vec::with_capacity(spec.n);
    let mut rows = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let row: Vec<f64> = (0..spec.features)
            .map(|_| match spec.levels {
                Some(l) => rng.gen_range(0..l) as f64,
                None => (rng.gen::<f64>() * 1000.0).floor() / 1000.0,
            })
            .collect();
        let score: f64 = coef
            .iter()
            .zip(&row)
            .map(|(c, x)| c * (x - mid) * scale)
            .sum::<f64>()
            + spec.noise * rng.gen_range(-1.0..1.0);
        labels.push(if score >= 0.0 { 1 } else { -1 });
        rows.push(
            row.into_iter()
                .enumerate()
                .filter(|&(_, v)| v != 0.0)
                .collect(),
        );
    }
    Dataset::from_rows(labels, rows, Some(spec.features))
}

/// Positive random weights, not normalized.
pub fn random_weights(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0.01..1.0)).collect()
}
