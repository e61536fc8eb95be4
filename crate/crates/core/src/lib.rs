//! Fairness audit of data preparation choices for tree learners.
//!
//! Loads the UCI Adult and German Credit datasets, discretises and encodes
//! them, undersamples training folds, fits decision trees and random
//! forests, and measures accuracy and group fairness (CVS, DI, NPI) across
//! a grid of configurations.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the command line tool uses.

pub mod constants;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod learners;
pub mod matrix;
pub mod metrics;
pub mod preprocess;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod seed;

pub use dataset::{Dataset, Schema};
pub use error::{Error, Result};
pub use experiment::{DataSources, ExperimentConfig, Learner, RunOptions};
pub use matrix::CategoricalMatrix;
pub use metrics::{ConfusionMatrix, MetricValue};
pub use preprocess::{EncodedDataset, EncodingKind};
pub use report::{GridPreset, RunConfig};
pub use sampling::SamplingStrategy;
pub use scalar::Scalar;

pub type Metric = metrics::MetricValue<f64>;
pub type Performance = metrics::Performance<f64>;
pub type FairnessReport = metrics::FairnessReport<f64>;
pub type RatioReport = metrics::RatioReport<f64>;
pub type DecisionTree = learners::DecisionTree<f64>;
pub type RandomForest = learners::RandomForest<f64>;
pub type FittedModel = learners::FittedModel<f64>;
pub type RunResult = experiment::RunResult<f64>;
pub type AggregateResult = experiment::AggregateResult<f64>;
pub type BoxplotStats = experiment::BoxplotStats<f64>;

pub type Metric32 = metrics::MetricValue<f32>;
pub type FairnessReport32 = metrics::FairnessReport<f32>;
pub type DecisionTree32 = learners::DecisionTree<f32>;
pub type RandomForest32 = learners::RandomForest<f32>;
pub type RunResult32 = experiment::RunResult<f32>;
