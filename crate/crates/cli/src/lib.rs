//! Command implementations behind the `fairprep` binary.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use log::info;

use fairprep::experiment::{self, DataPaths, DataSources};
use fairprep::report::{self, GridPreset, RunConfig, VerificationReport};

pub const RESULTS_FILE: &str = "results.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const BOXPLOT_FILE: &str = "boxplot.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

/// A parsed `run` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub config: RunConfig,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

/// Builds the run configuration from a file or preset plus overrides.
pub fn build_config(
    config_path: Option<&Path>,
    preset: Option<GridPreset>,
    seeds: Option<Vec<u64>>,
    data_dir: Option<PathBuf>,
) -> Result<RunConfig> {
    let mut config = match (config_path, preset) {
        (Some(_), Some(_)) => bail!("--config and --grid-preset are mutually exclusive"),
        (Some(path), None) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(p)) => RunConfig::preset(p),
        (None, None) => bail!("either --config or --grid-preset is required"),
    };
    // a manifest fed back as a config describes the previous run, not this one
    config.manifest = None;
    if let Some(seeds) = seeds {
        config.experiment.seeds = seeds;
    }
    if let Some(dir) = data_dir {
        config.data.dir = Some(dir);
    }
    Ok(config)
}

pub fn cmd_verify_datasets(paths: &DataPaths, out: Option<&Path>) -> Result<VerificationReport> {
    for p in [paths.adult_train(), paths.adult_test(), paths.german()] {
        if !p.is_file() {
            bail!("dataset file {} not found", p.display());
        }
    }
    let report = report::verify_datasets(paths)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        report.write_overview(create(&dir.join("overview.csv"))?)?;
        report.write_checks(create(&dir.join("checks.csv"))?)?;
    }
    Ok(report)
}

/// Paths of the files written by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutputs {
    pub results: PathBuf,
    pub aggregate: PathBuf,
    pub boxplot: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
    pub failed_rows: usize,
}

pub fn cmd_run(spec: &RunSpec) -> Result<RunOutputs> {
    let configs = spec.config.configs()?;
    let paths = spec.config.data_paths();
    fs::create_dir_all(&spec.out).with_context(|| format!("creating {}", spec.out.display()))?;
    let start = Instant::now();
    let data = DataSources::load_for(&paths, &configs)
        .with_context(|| format!("loading datasets from {}", paths.dir.display()))?;
    info!("data prepared in {:.1?}", start.elapsed());
    let seeds = &spec.config.experiment.seeds;
    info!("running {} configs x {} seeds", configs.len(), seeds.len());
    let results = experiment::run_grid_jobs::<f64>(&configs, &data, &spec.config.options(), seeds, spec.jobs)?;
    info!("{} rows in {:.1?}", results.len(), start.elapsed());
    let aggregates = experiment::aggregate(&results);

    let out = RunOutputs {
        results: spec.out.join(RESULTS_FILE),
        aggregate: spec.out.join(AGGREGATE_FILE),
        boxplot: spec.out.join(BOXPLOT_FILE),
        manifest: spec.out.join(MANIFEST_FILE),
        rows: results.len(),
        failed_rows: results.iter().filter(|r| !r.status.is_ok()).count(),
    };
    report::write_results(&results, create(&out.results)?)?;
    report::write_aggregate(&aggregates, create(&out.aggregate)?)?;
    report::write_boxplots(&aggregates, create(&out.boxplot)?)?;
    let manifest = report::manifest(&spec.config, configs.len(), &results);
    let mut w = create(&out.manifest)?;
    w.write_all(manifest.to_toml().as_bytes())?;
    w.flush()?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Scatter,
    Boxplot,
}

pub fn cmd_plotdata(results: &Path, kind: PlotKind, metrics: Option<&[String]>, out: &Path) -> Result<()> {
    let file = File::open(results).with_context(|| format!("opening {}", results.display()))?;
    let rows = report::read_results(BufReader::new(file)).with_context(|| format!("reading {}", results.display()))?;
    let names: Vec<&str> = match metrics {
        Some(m) => m.iter().map(String::as_str).collect(),
        None => match kind {
            PlotKind::Scatter => report::SCATTER_METRICS.to_vec(),
            PlotKind::Boxplot => report::BOXPLOT_METRICS.to_vec(),
        },
    };
    let mut buf = Vec::new();
    match kind {
        PlotKind::Scatter => report::write_scatter(&rows, &names, &mut buf)?,
        PlotKind::Boxplot => report::write_boxplot_data(&rows, &names, &mut buf)?,
    }
    fs::write(out, buf).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}
