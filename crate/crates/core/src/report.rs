//! Run configuration files, result/aggregate/boxplot CSV files, run
//! manifests and dataset verification tables.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constants::{self, Reference};
use crate::dataset;
use crate::error::{Error, Result};
use crate::experiment::{
    self, AggregateResult, DataPaths, DatasetId, ExperimentConfig, Learner, MetricRow, RunOptions, RunResult,
};
use crate::metrics::{self, MetricValue};
use crate::preprocess::{self, EncodedDataset, EncodingKind};
use crate::sampling::{undersample, SamplingStrategy};
use crate::scalar::Scalar;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// ---------------------------------------------------------------------------
// Number formatting

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn format_value<F: Scalar>(x: F) -> String {
    format_sig(x.to_f64().unwrap_or(f64::NAN), 6)
}

pub fn format_metric<F: Scalar>(v: MetricValue<F>) -> String {
    match v {
        MetricValue::Finite(x) => format_value(x),
        MetricValue::Infinite => "inf".into(),
        MetricValue::Undefined => "NA".into(),
    }
}

pub fn parse_metric(s: &str) -> Result<MetricValue<f64>> {
    match s {
        "NA" => Ok(MetricValue::Undefined),
        "inf" => Ok(MetricValue::Infinite),
        _ => s
            .parse::<f64>()
            .map(MetricValue::Finite)
            .map_err(|_| Error::invalid(format!("not a metric value: {s:?}"))),
    }
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

// ---------------------------------------------------------------------------
// Configuration

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    /// Directory holding adult.data, adult.test and german.data. Falls back
    /// to the environment override, then `data`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    pub german_split_seed: u64,
    pub german_train_fraction: f64,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            dir: None,
            german_split_seed: experiment::GERMAN_SPLIT_SEED,
            german_train_fraction: 0.7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub datasets: Vec<String>,
    pub encodings: Vec<String>,
    pub samplings: Vec<String>,
    /// `normal` and/or `stratified`.
    pub cv: Vec<String>,
    pub learners: Vec<String>,
    pub folds: usize,
    pub seeds: Vec<u64>,
    pub sampling_before_cv: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            datasets: vec!["adult".into(), "german".into()],
            encodings: vec!["integer".into(), "one-hot".into()],
            samplings: SamplingStrategy::ALL.iter().map(|s| s.as_str().to_owned()).collect(),
            cv: vec!["normal".into(), "stratified".into()],
            learners: Learner::ALL.iter().map(|l| l.as_str().to_owned()).collect(),
            folds: 5,
            seeds: (1..=30).collect(),
            sampling_before_cv: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerSection {
    pub max_depth: usize,
    pub min_instances_per_node: usize,
    pub n_trees: usize,
    pub bootstrap: bool,
}

impl Default for LearnerSection {
    fn default() -> Self {
        let o = RunOptions::default();
        LearnerSection {
            max_depth: o.max_depth,
            min_instances_per_node: o.min_instances_per_node,
            n_trees: o.n_trees,
            bootstrap: o.bootstrap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestSection {
    pub version: String,
    pub config_hash: String,
    pub configs: usize,
    pub rows: usize,
    pub failed_rows: usize,
}

/// A run configuration file. Sections: `[data]`, `[experiment]`,
/// `[learner]`, and `[manifest]` in files written after a run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: DataSection,
    pub experiment: ExperimentSection,
    pub learner: LearnerSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<ManifestSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridPreset {
    PaperAdult,
    PaperGerman,
    Smoke,
}

impl GridPreset {
    pub const ALL: [GridPreset; 3] = [GridPreset::PaperAdult, GridPreset::PaperGerman, GridPreset::Smoke];

    pub fn as_str(self) -> &'static str {
        match self {
            GridPreset::PaperAdult => "paper-adult",
            GridPreset::PaperGerman => "paper-german",
            GridPreset::Smoke => "smoke",
        }
    }
}

impl std::str::FromStr for GridPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GridPreset::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown grid preset {s:?}")))
    }
}

impl RunConfig {
    pub fn preset(preset: GridPreset) -> Self {
        let mut cfg = RunConfig::default();
        match preset {
            GridPreset::PaperAdult => cfg.experiment.datasets = vec!["adult".into()],
            GridPreset::PaperGerman => cfg.experiment.datasets = vec!["german".into()],
            GridPreset::Smoke => {
                cfg.experiment.datasets = vec!["german".into()];
                cfg.experiment.seeds = vec![1, 2];
            }
        }
        cfg
    }

    /// Parses TOML text; errors carry the line and column.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// SHA-256 of the configuration without its manifest section.
    pub fn hash(&self) -> String {
        let mut bare = self.clone();
        bare.manifest = None;
        let digest = Sha256::digest(bare.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn options(&self) -> RunOptions {
        RunOptions {
            max_depth: self.learner.max_depth,
            min_instances_per_node: self.learner.min_instances_per_node,
            n_trees: self.learner.n_trees,
            bootstrap: self.learner.bootstrap,
            sampling_before_cv: self.experiment.sampling_before_cv,
        }
    }

    pub fn data_paths(&self) -> DataPaths {
        let mut p = DataPaths::new(self.data.dir.clone().unwrap_or_else(experiment::default_data_dir));
        p.german_split_seed = self.data.german_split_seed;
        p.german_train_fraction = self.data.german_train_fraction;
        p
    }

    /// Expands the grid, reporting every invalid entry at once.
    pub fn configs(&self) -> Result<Vec<ExperimentConfig>> {
        let e = &self.experiment;
        let mut problems = Vec::new();
        fn collect<T, P: Fn(&str) -> Result<T>>(
            key: &str,
            values: &[String],
            parse: P,
            problems: &mut Vec<String>,
        ) -> Vec<T> {
            if values.is_empty() {
                problems.push(format!("experiment.{key}: empty list"));
            }
            let mut seen = BTreeSet::new();
            values
                .iter()
                .filter_map(|v| {
                    if !seen.insert(v.as_str()) {
                        problems.push(format!("experiment.{key}: duplicate {v:?}"));
                        return None;
                    }
                    parse(v)
                        .map_err(|err| problems.push(format!("experiment.{key}: {err}")))
                        .ok()
                })
                .collect()
        }
        let datasets = collect("datasets", &e.datasets, |s| s.parse::<DatasetId>(), &mut problems);
        let encodings = collect("encodings", &e.encodings, |s| s.parse::<EncodingKind>(), &mut problems);
        let samplings = collect(
            "samplings",
            &e.samplings,
            |s| s.parse::<SamplingStrategy>(),
            &mut problems,
        );
        let cv = collect(
            "cv",
            &e.cv,
            |s| match s {
                "normal" => Ok(false),
                "stratified" => Ok(true),
                other => Err(Error::Config(format!("unknown cv mode {other:?}"))),
            },
            &mut problems,
        );
        let learners = collect("learners", &e.learners, |s| s.parse::<Learner>(), &mut problems);
        if e.folds < 2 {
            problems.push(format!("experiment.folds: must be at least 2, got {}", e.folds));
        }
        if e.seeds.is_empty() {
            problems.push("experiment.seeds: empty list".into());
        }
        if e.seeds.iter().collect::<BTreeSet<_>>().len() != e.seeds.len() {
            problems.push("experiment.seeds: duplicate seed".into());
        }
        if e.seeds.iter().any(|&s| s > i64::MAX as u64) {
            problems.push("experiment.seeds: seeds must fit in a signed 64-bit integer".into());
        }
        let l = &self.learner;
        if l.max_depth == 0 {
            problems.push("learner.max_depth: must be positive".into());
        }
        if l.min_instances_per_node == 0 {
            problems.push("learner.min_instances_per_node: must be positive".into());
        }
        if l.n_trees == 0 {
            problems.push("learner.n_trees: must be positive".into());
        }
        let f = self.data.german_train_fraction;
        if !(f > 0.0 && f < 1.0) {
            problems.push(format!("data.german_train_fraction: must lie in (0, 1), got {f}"));
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("\n")));
        }
        let mut out = Vec::new();
        for &dataset in &datasets {
            for &encoding in &encodings {
                for &sampling in &samplings {
                    for &stratified in &cv {
                        for &learner in &learners {
                            out.push(ExperimentConfig {
                                dataset,
                                encoding,
                                sampling,
                                stratified,
                                k: e.folds,
                                learner,
                            });
                        }
                    }
                }
            }
        }
        out.sort_by_key(ExperimentConfig::id);
        Ok(out)
    }
}

/// Parses `1-30`, `1,2,5` or a mix such as `1-3,7`.
pub fn parse_seed_list(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Config(format!("invalid seed list {s:?}"));
    let mut seeds = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once('-') {
            let a: u64 = a.trim().parse().map_err(|_| bad())?;
            let b: u64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            seeds.extend(a..=b);
        } else {
            seeds.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(seeds)
}

/// The configuration as written next to the results, with a `[manifest]`
/// section. Feeding it back as a config reproduces the run.
pub fn manifest<F>(config: &RunConfig, n_configs: usize, results: &[RunResult<F>]) -> RunConfig {
    let mut m = config.clone();
    m.manifest = Some(ManifestSection {
        version: VERSION.to_owned(),
        config_hash: config.hash(),
        configs: n_configs,
        rows: results.len(),
        failed_rows: results.iter().filter(|r| !r.status.is_ok()).count(),
    });
    m
}

// ---------------------------------------------------------------------------
// Results files

pub const RESULTS_HEADER: [&str; 28] = [
    "config_id",
    "seed",
    "fold",
    "status",
    "n_train",
    "n_validation",
    "train_fav_priv",
    "train_fav_unpriv",
    "train_unfav_priv",
    "train_unfav_unpriv",
    "acc",
    "f1",
    "precision",
    "recall",
    "cvs",
    "di",
    "npi",
    "cvs_ratio",
    "cvs_ratio_abs",
    "npi_ratio",
    "cvs_substituted",
    "npi_substituted",
    "train_cvs",
    "train_di",
    "train_npi",
    "flip_changes",
    "passes_80_rule",
    "message",
];

pub fn write_results<F: Scalar, W: Write>(results: &[RunResult<F>], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in results {
        let (status, message) = match &r.status {
            experiment::RunStatus::Ok => ("ok", String::new()),
            experiment::RunStatus::Failed(m) => ("failed", m.replace('\n', " ")),
        };
        let c = r.train_cells;
        let rule = if r.status.is_ok() {
            metrics::passes_80_rule(r.di).to_string()
        } else {
            "NA".into()
        };
        w.write_record([
            r.config_id.clone(),
            r.seed.to_string(),
            r.fold.to_string(),
            status.into(),
            r.n_train.to_string(),
            r.n_validation.to_string(),
            c[3].to_string(),
            c[2].to_string(),
            c[1].to_string(),
            c[0].to_string(),
            format_metric(r.accuracy),
            format_metric(r.f1),
            format_metric(r.precision),
            format_metric(r.recall),
            format_metric(r.cvs),
            format_metric(r.di),
            format_metric(r.npi),
            format_metric(r.cvs_ratio),
            format_metric(r.cvs_ratio_abs),
            format_metric(r.npi_ratio),
            r.cvs_substituted.to_string(),
            r.npi_substituted.to_string(),
            format_metric(r.train_cvs),
            format_metric(r.train_di),
            format_metric(r.train_npi),
            r.flip_changes.to_string(),
            rule,
            message,
        ])?;
    }
    w.flush().map_err(|e| Error::io("results", e))?;
    Ok(())
}

/// Reads a results file back into metric rows, in the metric order of
/// [`RunResult::metrics`].
pub fn read_results<R: Read>(input: R) -> Result<Vec<MetricRow<f64>>> {
    let mut rd = csv::ReaderBuilder::new().from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != RESULTS_HEADER {
        return Err(Error::Schema("results file header does not match".into()));
    }
    let col = |name: &str| headers.iter().position(|h| h == name).expect("known column");
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let perr = |message: String| Error::Parse {
            file: "results".into(),
            line,
            message,
        };
        let get = |name: &str| rec.get(col(name)).unwrap_or("");
        let metric = |name: &str| parse_metric(get(name)).map_err(|e| perr(e.to_string()));
        let cvs = metric("cvs")?;
        let mut values = Vec::new();
        for name in experiment::METRIC_NAMES {
            let v = if name == "cvs_abs" {
                cvs.map(f64::abs)
            } else {
                metric(name)?
            };
            values.push((name.to_owned(), v));
        }
        rows.push(MetricRow {
            config_id: get("config_id").to_owned(),
            seed: get("seed").parse().map_err(|_| perr("bad seed".into()))?,
            fold: get("fold").parse().map_err(|_| perr("bad fold".into()))?,
            ok: get("status") == "ok",
            values,
        });
    }
    Ok(rows)
}

pub fn write_aggregate<F: Scalar, W: Write>(aggs: &[AggregateResult<F>], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "config_id",
        "rows",
        "failed",
        "metric",
        "n",
        "excluded",
        "mean",
        "sd",
        "seed_mean",
    ])?;
    let opt = |x: Option<F>| x.map(format_value).unwrap_or_else(|| "NA".into());
    for a in aggs {
        for m in &a.metrics {
            w.write_record([
                a.config_id.clone(),
                a.n_rows.to_string(),
                a.failed.to_string(),
                m.metric.clone(),
                m.n.to_string(),
                m.excluded.to_string(),
                opt(m.mean),
                opt(m.sd),
                opt(m.seed_mean),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("aggregate", e))?;
    Ok(())
}

pub fn write_boxplots<F: Scalar, W: Write>(aggs: &[AggregateResult<F>], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record([
        "config_id",
        "metric",
        "n",
        "min",
        "lower_whisker",
        "q1",
        "median",
        "q3",
        "upper_whisker",
        "max",
        "outliers",
    ])?;
    for a in aggs {
        for (name, b) in &a.boxplots {
            let n = a.metric(name).map(|m| m.n).unwrap_or(0);
            let outliers: Vec<String> = b.outliers.iter().map(|&x| format_value(x)).collect();
            w.write_record([
                a.config_id.clone(),
                name.clone(),
                n.to_string(),
                format_value(b.min),
                format_value(b.lower_whisker),
                format_value(b.q1),
                format_value(b.median),
                format_value(b.q3),
                format_value(b.upper_whisker),
                format_value(b.max),
                outliers.join(";"),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io("boxplot", e))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Plot data

pub const SCATTER_METRICS: [&str; 5] = ["cvs", "npi", "di", "acc", "f1"];
pub const BOXPLOT_METRICS: [&str; 2] = ["cvs_ratio", "npi_ratio"];

fn check_metric_names(names: &[&str]) -> Result<()> {
    let unknown: Vec<&str> = names
        .iter()
        .copied()
        .filter(|n| !experiment::METRIC_NAMES.contains(n))
        .collect();
    if unknown.is_empty() && !names.is_empty() {
        Ok(())
    } else if names.is_empty() {
        Err(Error::invalid("no metrics requested"))
    } else {
        Err(Error::invalid(format!(
            "unknown metric(s) {}; known: {}",
            unknown.join(", "),
            experiment::METRIC_NAMES.join(", ")
        )))
    }
}

/// One row per config with the mean of each requested metric.
pub fn write_scatter<W: Write>(rows: &[MetricRow<f64>], metrics: &[&str], out: W) -> Result<()> {
    check_metric_names(metrics)?;
    let aggs = experiment::aggregate_rows(rows, &[]);
    let mut w = csv_writer(out);
    let mut header = vec!["config_id"];
    header.extend_from_slice(metrics);
    w.write_record(&header)?;
    for a in &aggs {
        let mut rec = vec![a.config_id.clone()];
        for m in metrics {
            rec.push(
                a.metric(m)
                    .and_then(|s| s.mean)
                    .map(format_value)
                    .unwrap_or_else(|| "NA".into()),
            );
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("scatter", e))?;
    Ok(())
}

pub fn write_boxplot_data<W: Write>(rows: &[MetricRow<f64>], metrics: &[&str], out: W) -> Result<()> {
    check_metric_names(metrics)?;
    write_boxplots(&experiment::aggregate_rows(rows, metrics), out)
}

// ---------------------------------------------------------------------------
// Dataset verification

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetOverview {
    pub version: String,
    pub rows: usize,
    /// Ordered as in [`Reference::counts`].
    pub counts: [usize; 4],
    pub favourable_share: f64,
    pub unprivileged_share: f64,
    pub cvs: f64,
    pub npi: MetricValue<f64>,
    pub di: MetricValue<f64>,
    pub passes_80_rule: bool,
}

pub fn overview(version: &str, labels: &[bool], sensitive: &[bool]) -> Result<DatasetOverview> {
    let f = metrics::fairness_report::<f64>(labels, sensitive)?;
    let c = dataset::joint_counts(labels, sensitive);
    let n = labels.len();
    Ok(DatasetOverview {
        version: version.to_owned(),
        rows: n,
        counts: [c[3], c[2], c[1], c[0]],
        favourable_share: (c[2] + c[3]) as f64 / n as f64,
        unprivileged_share: (c[0] + c[2]) as f64 / n as f64,
        cvs: f.cvs,
        npi: f.npi,
        di: f.di,
        passes_80_rule: f.passes_80_rule,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub version: String,
    pub quantity: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub pass: bool,
}

fn close_check(version: &str, quantity: &str, expected: f64, actual: Option<f64>, tol: f64) -> Check {
    Check {
        version: version.to_owned(),
        quantity: quantity.to_owned(),
        expected: format_sig(expected, 6),
        actual: actual.map(|a| format_sig(a, 6)).unwrap_or_else(|| "NA".into()),
        tolerance: format_sig(tol, 6),
        pass: actual.is_some_and(|a| (a - expected).abs() <= tol),
    }
}

pub fn check_against(o: &DatasetOverview, r: &Reference) -> Vec<Check> {
    let v = o.version.as_str();
    let mut out = vec![Check {
        version: v.to_owned(),
        quantity: "counts".into(),
        expected: format!("{:?}", r.counts),
        actual: format!("{:?}", o.counts),
        tolerance: "0".into(),
        pass: o.counts == r.counts,
    }];
    out.push(close_check(v, "cvs", r.cvs, Some(o.cvs), r.cvs_tol));
    out.push(close_check(v, "npi", r.npi, o.npi.finite(), r.npi_tol));
    out.push(close_check(v, "di", r.di, o.di.finite(), r.di_tol));
    if let Some(s) = r.favourable_share {
        out.push(close_check(
            v,
            "favourable_share",
            s,
            Some(o.favourable_share),
            constants::SHARE_TOL,
        ));
    }
    if let Some(s) = r.unprivileged_share {
        out.push(close_check(
            v,
            "unprivileged_share",
            s,
            Some(o.unprivileged_share),
            constants::SHARE_TOL,
        ));
    }
    if let Some(p) = r.passes_80_rule {
        out.push(Check {
            version: v.to_owned(),
            quantity: "passes_80_rule".into(),
            expected: p.to_string(),
            actual: o.passes_80_rule.to_string(),
            tolerance: "0".into(),
            pass: o.passes_80_rule == p,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub overviews: Vec<DatasetOverview>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write_overview<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record([
            "version",
            "rows",
            "fav_priv",
            "fav_unpriv",
            "unfav_priv",
            "unfav_unpriv",
            "favourable_share",
            "unprivileged_share",
            "cvs",
            "npi",
            "di",
            "passes_80_rule",
        ])?;
        for o in &self.overviews {
            let mut rec = vec![o.version.clone(), o.rows.to_string()];
            rec.extend(o.counts.iter().map(usize::to_string));
            rec.extend([
                format_sig(o.favourable_share, 6),
                format_sig(o.unprivileged_share, 6),
                format_sig(o.cvs, 6),
                format_metric(o.npi),
                format_metric(o.di),
                o.passes_80_rule.to_string(),
            ]);
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("overview", e))?;
        Ok(())
    }

    pub fn write_checks<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv_writer(out);
        w.write_record(["version", "quantity", "expected", "actual", "tolerance", "result"])?;
        for c in &self.checks {
            w.write_record([
                c.version.as_str(),
                &c.quantity,
                &c.expected,
                &c.actual,
                &c.tolerance,
                if c.pass { "pass" } else { "FAIL" },
            ])?;
        }
        w.flush().map_err(|e| Error::io("checks", e))?;
        Ok(())
    }
}

fn encoded_overview(version: &str, e: &EncodedDataset) -> Result<DatasetOverview> {
    overview(version, &e.labels, &e.sensitive)
}

/// Builds every dataset version and compares it with the published values.
pub fn verify_datasets(paths: &DataPaths) -> Result<VerificationReport> {
    let adult = dataset::load_adult(&paths.adult_train(), &paths.adult_test())?;
    let german_raw = dataset::load_german(&paths.german())?;
    let german = preprocess::german_training_set(&german_raw, paths.german_train_fraction, paths.german_split_seed)?;

    let mut overviews = Vec::new();
    let mut checks = Vec::new();
    let mut add = |o: DatasetOverview, r: &Reference| {
        checks.extend(check_against(&o, r));
        overviews.push(o);
    };
    add(
        encoded_overview(
            "adult/one-hot",
            &preprocess::adult_version(&adult, EncodingKind::OneHot)?,
        )?,
        &constants::ADULT_ONE_HOT,
    );
    add(
        encoded_overview(
            "adult/integer",
            &preprocess::adult_version(&adult, EncodingKind::Integer)?,
        )?,
        &constants::ADULT_INTEGER,
    );
    let german_int = preprocess::german_version(&german, EncodingKind::Integer)?;
    add(encoded_overview("german/integer", &german_int)?, &constants::GERMAN);
    add(
        encoded_overview(
            "german/one-hot",
            &preprocess::german_version(&german, EncodingKind::OneHot)?,
        )?,
        &constants::GERMAN,
    );
    let all: Vec<usize> = (0..german_int.len()).collect();
    let sub = undersample(
        &all,
        &german_int.labels,
        &german_int.sensitive,
        SamplingStrategy::UndersamplingMultivariate,
        paths.german_split_seed,
    )?;
    let pick = |v: &[bool]| sub.indices.iter().map(|&i| v[i]).collect::<Vec<_>>();
    add(
        overview(
            constants::GERMAN_MULTIVARIATE.version,
            &pick(&german_int.labels),
            &pick(&german_int.sensitive),
        )?,
        &constants::GERMAN_MULTIVARIATE,
    );
    Ok(VerificationReport { overviews, checks })
}
