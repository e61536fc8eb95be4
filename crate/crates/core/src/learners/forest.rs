//! Bagged ensemble of decision trees with per-split feature subsampling.

use rand::Rng as _;
use rayon::prelude::*;

use super::tree::{check_fit_input, majority, DecisionTree, FeatureChoice, Grower, TreeConfig};
use crate::error::{Error, Result};
use crate::matrix::CategoricalMatrix;
use crate::scalar::Scalar;
use crate::seed;

/// Number of features considered at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidates {
    /// `floor(sqrt(d))`, at least one.
    Sqrt,
    All,
    Fixed(usize),
}

impl Candidates {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            Candidates::Sqrt => (n_features as f64).sqrt().floor() as usize,
            Candidates::All => n_features,
            Candidates::Fixed(k) => k.min(n_features),
        };
        k.max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestConfig {
    pub tree: TreeConfig,
    pub n_trees: usize,
    pub candidates: Candidates,
    pub bootstrap: bool,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            tree: TreeConfig::default(),
            n_trees: 10,
            candidates: Candidates::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest<F> {
    pub trees: Vec<DecisionTree<F>>,
    pub n_features: usize,
    pub config: ForestConfig,
}

impl<F: Scalar> RandomForest<F> {
    pub fn fit(x: &CategoricalMatrix, y: &[bool], rows: &[usize], config: ForestConfig) -> Result<Self> {
        config.tree.validate()?;
        if config.n_trees < 1 {
            return Err(Error::invalid("n_trees must be at least 1"));
        }
        if let Candidates::Fixed(0) = config.candidates {
            return Err(Error::invalid("candidates per split must be at least 1"));
        }
        check_fit_input(x, y, rows)?;
        let k = config.candidates.resolve(x.n_cols());
        let trees = (0..config.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed::rng(seed::mix(config.tree.seed, t as u64));
                let sample: Vec<usize> = if config.bootstrap {
                    (0..rows.len()).map(|_| rows[rng.gen_range(0..rows.len())]).collect()
                } else {
                    rows.to_vec()
                };
                let root =
                    Grower::<F>::new(x, y, config.tree, FeatureChoice::Random { k, rng: &mut rng }).grow(&sample, 0);
                DecisionTree {
                    root,
                    n_features: x.n_cols(),
                    config: config.tree,
                }
            })
            .collect();
        Ok(RandomForest {
            trees,
            n_features: x.n_cols(),
            config,
        })
    }

    /// Votes `[unfavourable, favourable]` over all trees.
    pub fn votes(&self, row: &[u32]) -> [usize; 2] {
        let mut v = [0usize; 2];
        for t in &self.trees {
            v[t.predict_row(row) as usize] += 1;
        }
        v
    }

    /// Majority vote; a tie goes to the unfavourable label.
    pub fn predict_row(&self, row: &[u32]) -> bool {
        majority(self.votes(row))
    }
}
