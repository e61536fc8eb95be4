use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fairprep::experiment::{DataPaths, DATA_DIR_ENV};
use fairprep::report::{self, GridPreset};
use fairprep_cli::{build_config, cmd_plotdata, cmd_run, cmd_verify_datasets, PlotKind, RunSpec};

#[derive(Parser)]
#[command(
    name = "fairprep",
    version,
    about = "Fairness audit of data preparation for tree learners"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    PaperAdult,
    PaperGerman,
    Smoke,
}

impl From<Preset> for GridPreset {
    fn from(p: Preset) -> Self {
        match p {
            Preset::PaperAdult => GridPreset::PaperAdult,
            Preset::PaperGerman => GridPreset::PaperGerman,
            Preset::Smoke => GridPreset::Smoke,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Scatter,
    Boxplot,
}

#[derive(Subcommand)]
enum Command {
    /// Rebuild every dataset version and check it against reference values.
    VerifyDatasets {
        #[arg(long, env = DATA_DIR_ENV, default_value = "data")]
        data_dir: PathBuf,
        /// Also write overview.csv and checks.csv here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configuration grid and write results, aggregates and a manifest.
    Run {
        #[arg(long, conflicts_with = "grid_preset")]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        grid_preset: Option<Preset>,
        /// Seed list such as 1-30 or 1,2,7.
        #[arg(long)]
        seeds: Option<String>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, env = DATA_DIR_ENV)]
        data_dir: Option<PathBuf>,
    },
    /// Turn a results file into scatter or boxplot data.
    PlotData {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Comma separated metric names.
        #[arg(long, value_delimiter = ',')]
        metrics: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::VerifyDatasets { data_dir, out } => {
            let report = cmd_verify_datasets(&DataPaths::new(data_dir), out.as_deref())?;
            report.write_overview(std::io::stdout().lock())?;
            println!();
            report.write_checks(std::io::stdout().lock())?;
            if report.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("verification failed");
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Run {
            config,
            grid_preset,
            seeds,
            jobs,
            out,
            data_dir,
        } => {
            let seeds = seeds.as_deref().map(report::parse_seed_list).transpose()?;
            let config = build_config(config.as_deref(), grid_preset.map(Into::into), seeds, data_dir)?;
            let outputs = cmd_run(&RunSpec { config, out, jobs })?;
            println!("{}", outputs.results.display());
            println!("{}", outputs.aggregate.display());
            println!("{}", outputs.boxplot.display());
            println!("{}", outputs.manifest.display());
            if outputs.failed_rows > 0 {
                eprintln!("{} of {} runs failed", outputs.failed_rows, outputs.rows);
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::PlotData {
            results,
            kind,
            metrics,
            out,
        } => {
            let kind = match kind {
                Kind::Scatter => PlotKind::Scatter,
                Kind::Boxplot => PlotKind::Boxplot,
            };
            cmd_plotdata(&results, kind, metrics.as_deref(), &out)?;
            println!("{}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
