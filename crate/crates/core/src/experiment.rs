//! Cross-validation, the configuration grid, the run loop and aggregation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::debug;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dataset::{self, joint_counts};
use crate::error::{Error, Result};
use crate::learners::{self, Candidates, FittedModel, ForestConfig, TreeConfig};
use crate::matrix::CategoricalMatrix;
use crate::metrics::{self, MetricValue};
use crate::preprocess::{self, EncodedDataset, EncodingKind};
use crate::sampling::{undersample, SamplingStrategy};
use crate::scalar::Scalar;
use crate::seed;

// ---------------------------------------------------------------------------
// Folds

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvConfig {
    pub k: usize,
    pub stratified: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Splits `0..labels.len()` into `k` validation folds.
///
/// Normal mode shuffles and cuts into contiguous near-equal chunks.
/// Stratified mode shuffles within each label class, lays the classes end
/// to end and deals positions round-robin, so every fold holds each class
/// to within one instance. Only the label is stratified.
pub fn make_folds(labels: &[bool], cv: CvConfig) -> Result<Vec<Fold>> {
    let n = labels.len();
    if cv.k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    if n < cv.k {
        return Err(Error::invalid(format!("{n} rows cannot form {} folds", cv.k)));
    }
    let mut rng = seed::rng(cv.seed);
    let mut assignment = vec![0usize; n];
    if cv.stratified {
        let mut pos = 0;
        for class in [false, true] {
            let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
            members.shuffle(&mut rng);
            for i in members {
                assignment[i] = pos % cv.k;
                pos += 1;
            }
        }
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let (base, extra) = (n / cv.k, n % cv.k);
        let mut start = 0;
        for f in 0..cv.k {
            let size = base + usize::from(f < extra);
            for &i in &order[start..start + size] {
                assignment[i] = f;
            }
            start += size;
        }
    }
    Ok((0..cv.k)
        .map(|f| {
            let (validation, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| assignment[i] == f);
            Fold { train, validation }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Configurations

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetId {
    Adult,
    German,
}

impl DatasetId {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetId::Adult => "adult",
            DatasetId::German => "german",
        }
    }
}

impl FromStr for DatasetId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adult" => Ok(DatasetId::Adult),
            "german" => Ok(DatasetId::German),
            other => Err(Error::Config(format!("unknown dataset {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Learner {
    Dt,
    DtNs,
    Rf,
    RfNs,
}

impl Learner {
    pub const ALL: [Learner; 4] = [Learner::Dt, Learner::DtNs, Learner::Rf, Learner::RfNs];

    pub fn as_str(self) -> &'static str {
        match self {
            Learner::Dt => "DT",
            Learner::DtNs => "DTns",
            Learner::Rf => "RF",
            Learner::RfNs => "RFns",
        }
    }

    pub fn removes_sensitive(self) -> bool {
        matches!(self, Learner::DtNs | Learner::RfNs)
    }

    pub fn is_forest(self) -> bool {
        matches!(self, Learner::Rf | Learner::RfNs)
    }
}

impl FromStr for Learner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Learner::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown learner {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExperimentConfig {
    pub dataset: DatasetId,
    pub encoding: EncodingKind,
    pub sampling: SamplingStrategy,
    pub stratified: bool,
    pub k: usize,
    pub learner: Learner,
}

impl ExperimentConfig {
    pub fn id(&self) -> String {
        format!(
            "{}/{}/{}/{}/{}",
            self.dataset.as_str(),
            self.encoding.as_str(),
            self.sampling.as_str(),
            if self.stratified { "stratified-cv" } else { "normal-cv" },
            self.learner.as_str()
        )
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// The full grid for one dataset: 2 encodings × 4 samplings × 2 CV modes ×
/// 4 learners, ordered by config id.
pub fn full_grid(dataset: DatasetId, k: usize) -> Vec<ExperimentConfig> {
    let mut grid = Vec::with_capacity(64);
    for encoding in [EncodingKind::Integer, EncodingKind::OneHot] {
        for sampling in SamplingStrategy::ALL {
            for stratified in [false, true] {
                for learner in Learner::ALL {
                    grid.push(ExperimentConfig {
                        dataset,
                        encoding,
                        sampling,
                        stratified,
                        k,
                        learner,
                    });
                }
            }
        }
    }
    grid.sort_by_key(ExperimentConfig::id);
    grid
}

/// Settings shared by every run in a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub max_depth: usize,
    pub min_instances_per_node: usize,
    pub n_trees: usize,
    pub bootstrap: bool,
    /// Undersample the whole training set once before building folds,
    /// instead of each training fold.
    pub sampling_before_cv: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_depth: 30,
            min_instances_per_node: 1,
            n_trees: 10,
            bootstrap: true,
            sampling_before_cv: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Data sources

/// One encoded dataset version, with its sensitive-free and S-flipped views.
#[derive(Debug, Clone)]
pub struct PreparedVersion {
    pub full: EncodedDataset,
    pub without_sensitive: EncodedDataset,
    flipped_full: CategoricalMatrix,
    flipped_without_sensitive: CategoricalMatrix,
}

impl PreparedVersion {
    pub fn new(full: EncodedDataset) -> Result<Self> {
        let without_sensitive = preprocess::remove_sensitive(&full)?;
        let flipped = full.with_sensitive_flipped();
        let flipped_full = flipped.features.clone();
        let flipped_without_sensitive = flipped.project(&without_sensitive.headers())?;
        Ok(PreparedVersion {
            full,
            without_sensitive,
            flipped_full,
            flipped_without_sensitive,
        })
    }

    fn view(&self, learner: Learner) -> (&EncodedDataset, &CategoricalMatrix) {
        if learner.removes_sensitive() {
            (&self.without_sensitive, &self.flipped_without_sensitive)
        } else {
            (&self.full, &self.flipped_full)
        }
    }
}

/// Where the raw files live and how German Credit is split.
#[derive(Debug, Clone, PartialEq)]
pub struct DataPaths {
    pub dir: PathBuf,
    pub german_split_seed: u64,
    pub german_train_fraction: f64,
}

impl DataPaths {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DataPaths {
            dir: dir.into(),
            german_split_seed: GERMAN_SPLIT_SEED,
            german_train_fraction: 0.7,
        }
    }

    pub fn adult_train(&self) -> PathBuf {
        self.dir.join("adult.data")
    }

    pub fn adult_test(&self) -> PathBuf {
        self.dir.join("adult.test")
    }

    pub fn german(&self) -> PathBuf {
        self.dir.join("german.data")
    }
}

/// Seed of the 70/30 German Credit split. Proportional allocation makes the
/// cell counts seed-independent; the seed only picks which rows.
pub const GERMAN_SPLIT_SEED: u64 = 0;

/// Encoded dataset versions keyed by (dataset, encoding).
#[derive(Debug, Clone, Default)]
pub struct DataSources {
    versions: BTreeMap<(DatasetId, EncodingKind), PreparedVersion>,
}

impl DataSources {
    pub fn insert(&mut self, dataset: DatasetId, encoding: EncodingKind, version: EncodedDataset) -> Result<()> {
        self.versions
            .insert((dataset, encoding), PreparedVersion::new(version)?);
        Ok(())
    }

    pub fn get(&self, dataset: DatasetId, encoding: EncodingKind) -> Result<&PreparedVersion> {
        self.versions.get(&(dataset, encoding)).ok_or_else(|| {
            Error::invalid(format!(
                "dataset version {}/{} not loaded",
                dataset.as_str(),
                encoding.as_str()
            ))
        })
    }

    /// Loads and encodes every version the configs need.
    pub fn load_for(paths: &DataPaths, configs: &[ExperimentConfig]) -> Result<Self> {
        let mut out = DataSources::default();
        let mut adult = None;
        let mut german = None;
        for cfg in configs {
            if out.versions.contains_key(&(cfg.dataset, cfg.encoding)) {
                continue;
            }
            let version = match cfg.dataset {
                DatasetId::Adult => {
                    if adult.is_none() {
                        adult = Some(dataset::load_adult(&paths.adult_train(), &paths.adult_test())?);
                    }
                    preprocess::adult_version(adult.as_ref().unwrap(), cfg.encoding)?
                }
                DatasetId::German => {
                    if german.is_none() {
                        let raw = dataset::load_german(&paths.german())?;
                        german = Some(preprocess::german_training_set(
                            &raw,
                            paths.german_train_fraction,
                            paths.german_split_seed,
                        )?);
                    }
                    preprocess::german_version(german.as_ref().unwrap(), cfg.encoding)?
                }
            };
            out.insert(cfg.dataset, cfg.encoding, version)?;
        }
        Ok(out)
    }
}

/// Default data directory: `$FAIRPREP_DATA_DIR`, else `data`.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new("data").to_path_buf())
}

pub const DATA_DIR_ENV: &str = "FAIRPREP_DATA_DIR";

// ---------------------------------------------------------------------------
// Runs

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    Failed(String),
}

impl RunStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RunStatus::Ok)
    }
}

pub const METRIC_NAMES: [&str; 14] = [
    "acc",
    "f1",
    "precision",
    "recall",
    "cvs",
    "cvs_abs",
    "di",
    "npi",
    "cvs_ratio",
    "cvs_ratio_abs",
    "npi_ratio",
    "train_cvs",
    "train_di",
    "train_npi",
];

/// One (config, seed, fold) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<F> {
    pub config_id: String,
    pub seed: u64,
    pub fold: usize,
    pub status: RunStatus,
    pub n_train: usize,
    pub n_validation: usize,
    /// Joint cell counts of the sampled training subset.
    pub train_cells: [usize; 4],
    pub accuracy: MetricValue<F>,
    pub f1: MetricValue<F>,
    pub precision: MetricValue<F>,
    pub recall: MetricValue<F>,
    pub cvs: MetricValue<F>,
    pub di: MetricValue<F>,
    pub npi: MetricValue<F>,
    pub cvs_ratio: MetricValue<F>,
    pub cvs_ratio_abs: MetricValue<F>,
    pub npi_ratio: MetricValue<F>,
    pub cvs_substituted: bool,
    pub npi_substituted: bool,
    pub train_cvs: MetricValue<F>,
    pub train_di: MetricValue<F>,
    pub train_npi: MetricValue<F>,
    /// Validation predictions that change when S is flipped.
    pub flip_changes: usize,
}

impl<F: Scalar> RunResult<F> {
    fn failed(config_id: &str, seed: u64, fold: usize, err: &Error) -> Self {
        let u = MetricValue::Undefined;
        RunResult {
            config_id: config_id.to_owned(),
            seed,
            fold,
            status: RunStatus::Failed(err.to_string()),
            n_train: 0,
            n_validation: 0,
            train_cells: [0; 4],
            accuracy: u,
            f1: u,
            precision: u,
            recall: u,
            cvs: u,
            di: u,
            npi: u,
            cvs_ratio: u,
            cvs_ratio_abs: u,
            npi_ratio: u,
            cvs_substituted: false,
            npi_substituted: false,
            train_cvs: u,
            train_di: u,
            train_npi: u,
            flip_changes: 0,
        }
    }

    /// Metric values named by [`METRIC_NAMES`], in that order.
    pub fn metrics(&self) -> Vec<(&'static str, MetricValue<F>)> {
        let values = [
            self.accuracy,
            self.f1,
            self.precision,
            self.recall,
            self.cvs,
            self.cvs.map(|x| x.abs()),
            self.di,
            self.npi,
            self.cvs_ratio,
            self.cvs_ratio_abs,
            self.npi_ratio,
            self.train_cvs,
            self.train_di,
            self.train_npi,
        ];
        METRIC_NAMES.into_iter().zip(values).collect()
    }
}

fn cvs_value<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> MetricValue<F> {
    metrics::cvs(outcomes, sensitive)
        .map(MetricValue::Finite)
        .unwrap_or(MetricValue::Undefined)
}

fn di_value<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> MetricValue<F> {
    metrics::disparate_impact(outcomes, sensitive).unwrap_or(MetricValue::Undefined)
}

fn npi_value<F: Scalar>(outcomes: &[bool], sensitive: &[bool]) -> MetricValue<F> {
    metrics::npi(outcomes, sensitive).unwrap_or(MetricValue::Undefined)
}

fn pick<T: Copy>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i]).collect()
}

#[allow(clippy::too_many_arguments)]
fn run_fold<F: Scalar>(
    config: &ExperimentConfig,
    version: &PreparedVersion,
    options: &RunOptions,
    seed_value: u64,
    fold_index: usize,
    fold: &Fold,
    presampled: bool,
) -> Result<RunResult<F>> {
    let (data, flipped) = version.view(config.learner);
    let labels = &data.labels;
    let sensitive = &data.sensitive;
    let fold_seed = seed::mix(seed_value, fold_index as u64);
    let train = if presampled {
        fold.train.clone()
    } else {
        undersample(&fold.train, labels, sensitive, config.sampling, fold_seed)?.indices
    };
    let train_y = pick(labels, &train);
    let train_s = pick(sensitive, &train);
    let train_cells = joint_counts(&train_y, &train_s);
    debug!(
        "{} seed={} fold={} strategy={} cells before={:?} after={:?}",
        config.id(),
        seed_value,
        fold_index,
        config.sampling,
        joint_counts(&pick(labels, &fold.train), &pick(sensitive, &fold.train)),
        train_cells
    );
    let train_cvs = cvs_value::<F>(&train_y, &train_s);
    let train_npi = npi_value::<F>(&train_y, &train_s);
    let train_di = di_value::<F>(&train_y, &train_s);

    let tree = TreeConfig {
        max_depth: options.max_depth,
        min_instances_per_node: options.min_instances_per_node,
        seed: seed::mix(fold_seed, 0x7EE5),
        ..TreeConfig::default()
    };
    let names = data.headers();
    let model: FittedModel<F> = if config.learner.is_forest() {
        learners::fit_forest(
            &data.features,
            labels,
            &train,
            names,
            ForestConfig {
                tree,
                n_trees: options.n_trees,
                candidates: Candidates::Sqrt,
                bootstrap: options.bootstrap,
            },
        )?
    } else {
        learners::fit_tree(&data.features, labels, &train, names, tree)?
    };

    let val_x = data.features.select_rows(&fold.validation);
    let predictions = learners::predict(&model, &val_x)?;
    let flipped_predictions = learners::predict(&model, &flipped.select_rows(&fold.validation))?;
    let flip_changes = predictions
        .iter()
        .zip(&flipped_predictions)
        .filter(|(a, b)| a != b)
        .count();

    let val_y = pick(labels, &fold.validation);
    let val_s = pick(sensitive, &fold.validation);
    let cm = metrics::confusion(&val_y, &predictions, &true)?;
    let perf = metrics::performance::<F>(&cm);
    let cvs = cvs_value::<F>(&predictions, &val_s);
    let npi = npi_value::<F>(&predictions, &val_s);
    let ratios = metrics::ratio_report(cvs, train_cvs, npi, train_npi);

    Ok(RunResult {
        config_id: config.id(),
        seed: seed_value,
        fold: fold_index,
        status: RunStatus::Ok,
        n_train: train.len(),
        n_validation: fold.validation.len(),
        train_cells,
        accuracy: perf.accuracy,
        f1: perf.f1,
        precision: perf.precision,
        recall: perf.recall,
        cvs,
        di: di_value(&predictions, &val_s),
        npi,
        cvs_ratio: ratios.cvs_ratio.value,
        cvs_ratio_abs: ratios.cvs_ratio_abs,
        npi_ratio: ratios.npi_ratio.value,
        cvs_substituted: ratios.cvs_ratio.substituted,
        npi_substituted: ratios.npi_ratio.substituted,
        train_cvs,
        train_di,
        train_npi,
        flip_changes,
    })
}

/// All folds of one config under one seed. Failures become rows with a
/// non-ok status rather than aborting.
pub fn run_seed<F: Scalar>(
    config: &ExperimentConfig,
    data: &DataSources,
    options: &RunOptions,
    seed_value: u64,
) -> Vec<RunResult<F>> {
    let id = config.id();
    let version = match data.get(config.dataset, config.encoding) {
        Ok(v) => v,
        Err(e) => return vec![RunResult::failed(&id, seed_value, 0, &e)],
    };
    let (view, _) = version.view(config.learner);
    let cv = CvConfig {
        k: config.k,
        stratified: config.stratified,
        seed: seed_value,
    };
    let folds = if options.sampling_before_cv {
        let all: Vec<usize> = (0..view.len()).collect();
        undersample(
            &all,
            &view.labels,
            &view.sensitive,
            config.sampling,
            seed::mix(seed_value, u64::MAX),
        )
        .and_then(|subset| {
            let sub_labels = pick(&view.labels, &subset.indices);
            let folds = make_folds(&sub_labels, cv)?;
            Ok(folds
                .into_iter()
                .map(|f| Fold {
                    train: pick(&subset.indices, &f.train),
                    validation: pick(&subset.indices, &f.validation),
                })
                .collect::<Vec<_>>())
        })
    } else {
        make_folds(&view.labels, cv)
    };
    let folds = match folds {
        Ok(f) => f,
        Err(e) => return vec![RunResult::failed(&id, seed_value, 0, &e)],
    };
    folds
        .iter()
        .enumerate()
        .map(|(i, fold)| {
            run_fold(
                config,
                version,
                options,
                seed_value,
                i,
                fold,
                options.sampling_before_cv,
            )
            .unwrap_or_else(|e| RunResult::failed(&id, seed_value, i, &e))
        })
        .collect()
}

pub fn run_config<F: Scalar>(
    config: &ExperimentConfig,
    data: &DataSources,
    options: &RunOptions,
    seeds: &[u64],
) -> Vec<RunResult<F>> {
    seeds.iter().flat_map(|&s| run_seed(config, data, options, s)).collect()
}

/// Runs every (config, seed) pair, in parallel on the current rayon pool,
/// and returns rows sorted by (config id, seed, fold).
pub fn run_grid<F: Scalar>(
    configs: &[ExperimentConfig],
    data: &DataSources,
    options: &RunOptions,
    seeds: &[u64],
) -> Vec<RunResult<F>> {
    let tasks: Vec<(&ExperimentConfig, u64)> = configs
        .iter()
        .flat_map(|c| seeds.iter().map(move |&s| (c, s)))
        .collect();
    let mut rows: Vec<RunResult<F>> = tasks
        .par_iter()
        .flat_map_iter(|(c, s)| run_seed(c, data, options, *s))
        .collect();
    rows.sort_by(|a, b| (a.config_id.as_str(), a.seed, a.fold).cmp(&(b.config_id.as_str(), b.seed, b.fold)));
    rows
}

/// [`run_grid`] on a dedicated pool of `jobs` threads; `None` uses the
/// global pool.
pub fn run_grid_jobs<F: Scalar>(
    configs: &[ExperimentConfig],
    data: &DataSources,
    options: &RunOptions,
    seeds: &[u64],
    jobs: Option<usize>,
) -> Result<Vec<RunResult<F>>> {
    match jobs {
        None => Ok(run_grid(configs, data, options, seeds)),
        Some(0) => Err(Error::invalid("jobs must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::invalid(e.to_string()))?;
            Ok(pool.install(|| run_grid(configs, data, options, seeds)))
        }
    }
}

// ---------------------------------------------------------------------------
// Aggregation

/// A config's metric values in row form, independent of where they came
/// from (a live run or a results file).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow<F> {
    pub config_id: String,
    pub seed: u64,
    pub fold: usize,
    pub ok: bool,
    pub values: Vec<(String, MetricValue<F>)>,
}

impl<F: Scalar> From<&RunResult<F>> for MetricRow<F> {
    fn from(r: &RunResult<F>) -> Self {
        MetricRow {
            config_id: r.config_id.clone(),
            seed: r.seed,
            fold: r.fold,
            ok: r.status.is_ok(),
            values: r.metrics().into_iter().map(|(k, v)| (k.to_owned(), v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary<F> {
    pub metric: String,
    pub n: usize,
    /// Rows whose value was undefined or infinite.
    pub excluded: usize,
    pub mean: Option<F>,
    /// Sample standard deviation; zero for a single value.
    pub sd: Option<F>,
    /// Mean over seeds of the per-seed mean over folds.
    pub seed_mean: Option<F>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotStats<F> {
    pub min: F,
    pub q1: F,
    pub median: F,
    pub q3: F,
    pub max: F,
    pub lower_whisker: F,
    pub upper_whisker: F,
    pub outliers: Vec<F>,
}

/// Quartiles by linear interpolation; whiskers reach the most extreme
/// values within 1.5 IQR of the box.
pub fn boxplot<F: Scalar>(values: &[F]) -> Option<BoxplotStats<F>> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let q = |p: f64| preprocess::quantile(&v, F::lit(p)).expect("non-empty");
    let (q1, median, q3) = (q(0.25), q(0.5), q(0.75));
    let reach = (q3 - q1) * F::lit(1.5);
    let (lo, hi) = (q1 - reach, q3 + reach);
    let inside: Vec<F> = v.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
    Some(BoxplotStats {
        min: v[0],
        q1,
        median,
        q3,
        max: v[v.len() - 1],
        lower_whisker: inside[0],
        upper_whisker: inside[inside.len() - 1],
        outliers: v.iter().copied().filter(|&x| x < lo || x > hi).collect(),
    })
}

pub fn mean<F: Scalar>(v: &[F]) -> Option<F> {
    if v.is_empty() {
        None
    } else {
        Some(v.iter().copied().sum::<F>() / F::from_count(v.len()))
    }
}

pub fn sample_sd<F: Scalar>(v: &[F]) -> Option<F> {
    let m = mean(v)?;
    if v.len() == 1 {
        return Some(F::zero());
    }
    let ss: F = v.iter().map(|&x| (x - m) * (x - m)).sum();
    Some((ss / F::from_count(v.len() - 1)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult<F> {
    pub config_id: String,
    pub n_rows: usize,
    pub failed: usize,
    pub metrics: Vec<MetricSummary<F>>,
    /// Boxplot statistics for the ratio metrics.
    pub boxplots: Vec<(String, BoxplotStats<F>)>,
}

impl<F: Scalar> AggregateResult<F> {
    pub fn metric(&self, name: &str) -> Option<&MetricSummary<F>> {
        self.metrics.iter().find(|m| m.metric == name)
    }
}

pub const RATIO_METRICS: [&str; 3] = ["cvs_ratio", "cvs_ratio_abs", "npi_ratio"];

/// Per-config summaries, ordered by config id. Failed rows count toward
/// `failed` and are excluded from every metric.
pub fn aggregate_rows<F: Scalar>(rows: &[MetricRow<F>], boxplot_metrics: &[&str]) -> Vec<AggregateResult<F>> {
    let mut by_config: BTreeMap<&str, Vec<&MetricRow<F>>> = BTreeMap::new();
    for r in rows {
        by_config.entry(r.config_id.as_str()).or_default().push(r);
    }
    by_config
        .into_iter()
        .map(|(id, group)| {
            let names: Vec<&str> = group
                .first()
                .map(|r| r.values.iter().map(|(k, _)| k.as_str()).collect())
                .unwrap_or_default();
            let failed = group.iter().filter(|r| !r.ok).count();
            let mut metrics = Vec::new();
            let mut boxplots = Vec::new();
            for (mi, name) in names.iter().enumerate() {
                let mut finite = Vec::new();
                let mut per_seed: BTreeMap<u64, Vec<F>> = BTreeMap::new();
                let mut excluded = 0;
                for r in &group {
                    match r.values.get(mi).map(|(_, v)| *v) {
                        Some(MetricValue::Finite(x)) if r.ok => {
                            finite.push(x);
                            per_seed.entry(r.seed).or_default().push(x);
                        }
                        _ => excluded += 1,
                    }
                }
                let seed_means: Vec<F> = per_seed.values().filter_map(|v| mean(v)).collect();
                metrics.push(MetricSummary {
                    metric: name.to_string(),
                    n: finite.len(),
                    excluded,
                    mean: mean(&finite),
                    sd: sample_sd(&finite),
                    seed_mean: mean(&seed_means),
                });
                if boxplot_metrics.contains(name) {
                    if let Some(b) = boxplot(&finite) {
                        boxplots.push((name.to_string(), b));
                    }
                }
            }
            AggregateResult {
                config_id: id.to_owned(),
                n_rows: group.len(),
                failed,
                metrics,
                boxplots,
            }
        })
        .collect()
}

pub fn aggregate<F: Scalar>(results: &[RunResult<F>]) -> Vec<AggregateResult<F>> {
    let rows: Vec<MetricRow<F>> = results.iter().map(MetricRow::from).collect();
    aggregate_rows(&rows, &RATIO_METRICS)
}
