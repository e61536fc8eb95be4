//! Decision tree and random forest classifiers over categorical features.

mod forest;
mod split;
mod tree;

pub use forest::{Candidates, ForestConfig, RandomForest};
pub use split::{best_partition, best_split, category_counts, gain, gini, min_gain, ClassCounts, Split};
pub use tree::{DecisionTree, Impurity, TreeConfig, TreeNode};

use crate::error::{Error, Result};
use crate::matrix::CategoricalMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum Model<F> {
    DecisionTree(DecisionTree<F>),
    RandomForest(RandomForest<F>),
}

/// A fitted classifier together with the names of the feature columns it
/// was trained on, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel<F> {
    pub model: Model<F>,
    pub feature_names: Vec<String>,
}

impl<F: Scalar> FittedModel<F> {
    pub fn n_features(&self) -> usize {
        match &self.model {
            Model::DecisionTree(t) => t.n_features,
            Model::RandomForest(f) => f.n_features,
        }
    }

    pub fn predict_row(&self, row: &[u32]) -> bool {
        match &self.model {
            Model::DecisionTree(t) => t.predict_row(row),
            Model::RandomForest(f) => f.predict_row(row),
        }
    }
}

pub fn fit_tree<F: Scalar>(
    x: &CategoricalMatrix,
    y: &[bool],
    rows: &[usize],
    feature_names: Vec<String>,
    config: TreeConfig,
) -> Result<FittedModel<F>> {
    Ok(FittedModel {
        model: Model::DecisionTree(DecisionTree::fit(x, y, rows, config)?),
        feature_names,
    })
}

pub fn fit_forest<F: Scalar>(
    x: &CategoricalMatrix,
    y: &[bool],
    rows: &[usize],
    feature_names: Vec<String>,
    config: ForestConfig,
) -> Result<FittedModel<F>> {
    Ok(FittedModel {
        model: Model::RandomForest(RandomForest::fit(x, y, rows, config)?),
        feature_names,
    })
}

/// Predicts every row of `x`, which must have the training feature layout.
pub fn predict<F: Scalar>(model: &FittedModel<F>, x: &CategoricalMatrix) -> Result<Vec<bool>> {
    if x.n_cols() != model.n_features() {
        return Err(Error::MalformedRow {
            row: 0,
            expected: model.n_features(),
            found: x.n_cols(),
        });
    }
    Ok(x.rows().take(x.n_rows()).map(|r| model.predict_row(r)).collect())
}
