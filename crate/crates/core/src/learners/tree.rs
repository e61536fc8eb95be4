//! CART-style decision tree over categorical features.

use std::io::Write;

use rand::seq::index;

use super::split::{best_split, gini_unchecked, ClassCounts};
use crate::error::{Error, Result};
use crate::matrix::CategoricalMatrix;
use crate::scalar::Scalar;
use crate::seed::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Impurity {
    Gini,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeConfig {
    pub max_depth: usize,
    pub impurity: Impurity,
    /// Minimum rows on each side of a split.
    pub min_instances_per_node: usize,
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            max_depth: 30,
            impurity: Impurity::Gini,
            min_instances_per_node: 1,
            seed: 0,
        }
    }
}

impl TreeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::invalid("max_depth must be at least 1"));
        }
        if self.min_instances_per_node < 1 {
            return Err(Error::invalid("min_instances_per_node must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode<F> {
    Leaf {
        prediction: bool,
        counts: ClassCounts,
    },
    Internal {
        feature: usize,
        left_categories: Vec<u32>,
        right_categories: Vec<u32>,
        counts: ClassCounts,
        impurity: F,
        gain: F,
        left: Box<TreeNode<F>>,
        right: Box<TreeNode<F>>,
    },
}

impl<F: Scalar> TreeNode<F> {
    pub fn counts(&self) -> ClassCounts {
        match self {
            TreeNode::Leaf { counts, .. } | TreeNode::Internal { counts, .. } => *counts,
        }
    }

    fn weight(&self) -> usize {
        let c = self.counts();
        c[0] + c[1]
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    /// Categories unseen at a node follow the child that received more
    /// training rows (left on a tie).
    pub fn predict(&self, row: &[u32]) -> bool {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { prediction, .. } => return *prediction,
                TreeNode::Internal {
                    feature,
                    left_categories,
                    right_categories,
                    left,
                    right,
                    ..
                } => {
                    let c = row[*feature];
                    node = if left_categories.binary_search(&c).is_ok() {
                        left
                    } else if right_categories.binary_search(&c).is_ok() {
                        right
                    } else if left.weight() >= right.weight() {
                        left
                    } else {
                        right
                    };
                }
            }
        }
    }
}

/// Majority class; a tie goes to the unfavourable label.
pub(crate) fn majority(counts: ClassCounts) -> bool {
    counts[1] > counts[0]
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<F> {
    pub root: TreeNode<F>,
    pub n_features: usize,
    pub config: TreeConfig,
}

/// How candidate features are chosen at each node.
pub(crate) enum FeatureChoice<'a> {
    All,
    Random { k: usize, rng: &'a mut Rng },
}

pub(crate) struct Grower<'a, F> {
    pub x: &'a CategoricalMatrix,
    pub y: &'a [bool],
    pub config: TreeConfig,
    pub choice: FeatureChoice<'a>,
    _scalar: std::marker::PhantomData<F>,
}

impl<'a, F: Scalar> Grower<'a, F> {
    pub fn new(x: &'a CategoricalMatrix, y: &'a [bool], config: TreeConfig, choice: FeatureChoice<'a>) -> Self {
        Grower {
            x,
            y,
            config,
            choice,
            _scalar: std::marker::PhantomData,
        }
    }

    fn candidates(&mut self) -> Vec<usize> {
        let d = self.x.n_cols();
        match &mut self.choice {
            FeatureChoice::All => (0..d).collect(),
            FeatureChoice::Random { k, rng } => {
                let mut v = index::sample(*rng, d, (*k).min(d)).into_vec();
                v.sort_unstable();
                v
            }
        }
    }

    pub fn grow(&mut self, rows: &[usize], depth: usize) -> TreeNode<F> {
        let mut counts = [0usize; 2];
        for &i in rows {
            counts[self.y[i] as usize] += 1;
        }
        let leaf = TreeNode::Leaf {
            prediction: majority(counts),
            counts,
        };
        let min = self.config.min_instances_per_node;
        if depth >= self.config.max_depth
            || counts[0] == 0
            || counts[1] == 0
            || rows.len() < 2 * min
            || self.x.n_cols() == 0
        {
            return leaf;
        }
        let features = self.candidates();
        let Some(split) = best_split::<F>(self.x, self.y, rows, &features, min) else {
            return leaf;
        };
        let mut goes_left = vec![false; self.x.arity()[split.feature] as usize];
        for &c in &split.left {
            if c as usize >= goes_left.len() {
                goes_left.resize(c as usize + 1, false);
            }
            goes_left[c as usize] = true;
        }
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| {
            goes_left
                .get(self.x.get(i, split.feature) as usize)
                .copied()
                .unwrap_or(false)
        });
        let left = self.grow(&l, depth + 1);
        let right = self.grow(&r, depth + 1);
        TreeNode::Internal {
            feature: split.feature,
            left_categories: split.left,
            right_categories: split.right,
            counts,
            impurity: gini_unchecked(counts),
            gain: split.gain,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

pub(crate) fn check_fit_input(x: &CategoricalMatrix, y: &[bool], rows: &[usize]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("cannot fit on zero rows"));
    }
    if y.len() != x.n_rows() {
        return Err(Error::LengthMismatch {
            left: x.n_rows(),
            right: y.len(),
        });
    }
    if let Some(&bad) = rows.iter().find(|&&i| i >= x.n_rows()) {
        return Err(Error::invalid(format!("row index {bad} out of range")));
    }
    Ok(())
}

impl<F: Scalar> DecisionTree<F> {
    /// Fits on the rows `rows` of `(x, y)`; duplicate indices count twice.
    pub fn fit(x: &CategoricalMatrix, y: &[bool], rows: &[usize], config: TreeConfig) -> Result<Self> {
        config.validate()?;
        check_fit_input(x, y, rows)?;
        let root = Grower::<F>::new(x, y, config, FeatureChoice::All).grow(rows, 0);
        Ok(DecisionTree {
            root,
            n_features: x.n_cols(),
            config,
        })
    }

    pub fn predict_row(&self, row: &[u32]) -> bool {
        self.root.predict(row)
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// Indented text dump: one line per node with its split and class counts.
    pub fn write_dump<W: Write>(&self, names: &[String], mut out: W) -> std::io::Result<()> {
        fn walk<F: Scalar, W: Write>(
            node: &TreeNode<F>,
            names: &[String],
            depth: usize,
            out: &mut W,
        ) -> std::io::Result<()> {
            let pad = "  ".repeat(depth);
            match node {
                TreeNode::Leaf { prediction, counts } => writeln!(
                    out,
                    "{pad}leaf predict={} counts={}/{}",
                    u8::from(*prediction),
                    counts[0],
                    counts[1]
                ),
                TreeNode::Internal {
                    feature,
                    left_categories,
                    counts,
                    impurity,
                    gain,
                    left,
                    right,
                    ..
                } => {
                    let name = names.get(*feature).cloned().unwrap_or_else(|| format!("f{feature}"));
                    let cats: Vec<String> = left_categories.iter().map(u32::to_string).collect();
                    writeln!(
                        out,
                        "{pad}split {name} in {{{}}} counts={}/{} gini={impurity:.6} gain={gain:.6}",
                        cats.join(","),
                        counts[0],
                        counts[1]
                    )?;
                    walk(left, names, depth + 1, out)?;
                    walk(right, names, depth + 1, out)
                }
            }
        }
        walk(&self.root, names, 0, &mut out)
    }
}
