use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use onef::config::DiagnosticsConfig;
use onef::{
    analyze_series, generate_series, parse_config, read_series, run_experiment, ExperimentConfig,
    ExperimentName, RunStatus, RunSummary,
};
use onef_core::generators::{FgnConfig, GeneratorConfig};

#[derive(Parser)]
#[command(
    name = "onef",
    version,
    about = "Hurst effect, 1/f spectra and long-range dependence experiments"
)]
struct Cli {
    /// Only report errors.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides base_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for this run.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root under which runs without --out or output_dir are written.
    #[arg(long, env = "ONEF_OUT", default_value = "onef-runs")]
    out_root: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Write one realization of the configured generator to series.csv.
    Generate(RunArgs),
    /// Run the estimators on one column of a CSV file.
    Analyze {
        input: PathBuf,
        /// Column to analyze; defaults to `x`, else the last column.
        #[arg(long)]
        column: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a named experiment and gate on its tolerances.
    Experiment {
        name: ExperimentName,
        #[command(flatten)]
        run: RunArgs,
    },
    /// List the named experiments.
    ListExperiments,
}

fn load(path: &Path) -> Result<ExperimentConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_config(&text).with_context(|| format!("invalid config {}", path.display()))
}

fn out_dir(args: &RunArgs, cfg: Option<&ExperimentConfig>, name: &str) -> PathBuf {
    args.out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()).map(PathBuf::from))
        .unwrap_or_else(|| args.out_root.join(name))
}

fn report(summary: &RunSummary, out: &Path, quiet: bool) -> ExitCode {
    if let Some(e) = &summary.error {
        eprintln!("error: {e}");
    }
    if !quiet {
        for c in &summary.checks {
            println!(
                "{} {:<26} {:>12.5} in [{:.4}, {:.4}]",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.lo,
                c.hi
            );
        }
        for f in &summary.fits {
            if summary.checks.is_empty() {
                println!("{:<26} {:>12.5}", f.estimator, f.exponent);
            }
        }
        println!(
            "{}: {:?} in {:.1}s, summary at {}",
            summary.experiment,
            summary.status,
            summary.wall_time_s,
            out.join("summary.toml").display()
        );
    }
    match summary.status {
        RunStatus::Passed => ExitCode::SUCCESS,
        RunStatus::Failed => ExitCode::from(1),
        RunStatus::Error => ExitCode::from(2),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let quiet = cli.quiet;
    match cli.command {
        Command::ListExperiments => {
            for name in ExperimentName::ALL {
                println!("{:<18} {}", name.as_str(), name.description());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate(args) => {
            let mut cfg = match &args.config {
                Some(p) => load(p)?,
                None => ExperimentConfig::custom(GeneratorConfig::Fgn(FgnConfig::default()))?,
            };
            if let Some(s) = args.seed {
                cfg.base_seed = s;
            }
            let out = out_dir(&args, Some(&cfg), "generate");
            Ok(report(&generate_series(&cfg, &out), &out, quiet))
        }
        Command::Analyze { input, column, run } => {
            let values = read_series(&input, column.as_deref())?;
            let diag = match &run.config {
                Some(p) => load(p)?.diagnostics,
                None => DiagnosticsConfig::for_length(values.len()),
            };
            let out = out_dir(&run, None, "analyze");
            let source = input.display().to_string();
            Ok(report(
                &analyze_series(values, &source, &diag, &out),
                &out,
                quiet,
            ))
        }
        Command::Experiment { name, run } => {
            let mut cfg = match &run.config {
                Some(p) => load(p)?,
                None => ExperimentConfig::named(name)?,
            };
            if cfg.experiment != name {
                anyhow::bail!("config is for experiment {}, not {name}", cfg.experiment);
            }
            if let Some(s) = run.seed {
                cfg.base_seed = s;
            }
            let out = out_dir(&run, Some(&cfg), name.as_str());
            Ok(report(&run_experiment(&cfg, &out), &out, quiet))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
