use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

mod config;
mod error;
mod experiments;
mod output;

use config::ExperimentConfig;
use error::CliError;

/// Run Kaczmarz reconstruction experiments from JSON configs.
///
/// Exit status: 0 on success, 1 on I/O failure, 2 on a config error,
/// 3 on a numerical or domain error.
#[derive(Debug, Parser)]
#[command(name = "kaczlab", version)]
struct Cli {
    /// Experiment name, or `list` to show the available experiments
    experiment: String,

    /// JSON experiment config
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (overrides `output.path`; default `out`)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for stochastic inputs (overrides `parameters.seed`)
    #[arg(long)]
    seed: Option<u64>,

    /// Only report errors
    #[arg(long)]
    quiet: bool,
}

fn list() {
    let width = experiments::EXPERIMENTS.iter().map(|e| e.name.len()).max().unwrap_or(0);
    for e in experiments::EXPERIMENTS {
        println!("{:width$}  {}", e.name, e.description);
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let experiment = experiments::find(&cli.experiment)
        .ok_or_else(|| CliError::Config(format!("unknown experiment {:?}; see `kaczlab list`", cli.experiment)))?;
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <file> is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(name) = &cfg.experiment {
        if name != experiment.name {
            return Err(CliError::Config(format!(
                "config is for experiment {name:?}, not {:?}",
                experiment.name
            )));
        }
    }
    if cli.seed.is_some() {
        cfg.parameters.seed = cli.seed;
    }
    cfg.validate()?;

    let out_dir = cli
        .out
        .clone()
        .or_else(|| cfg.output.path.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out_dir).map_err(|e| CliError::io(&out_dir, e))?;

    let start = Instant::now();
    let outcome = (experiment.run)(&cfg)?;
    let wall = start.elapsed().as_secs_f64();

    let mut files = Vec::new();
    for table in &outcome.tables {
        let written = table.write(&out_dir, cfg.output.format)?;
        if !cli.quiet {
            println!("wrote {}", written.display());
        }
        files.push(table.file_name(cfg.output.format));
    }
    let summary = json!({
        "experiment": experiment.name,
        "version": kaczlab_core::VERSION,
        "config": cfg,
        "wall_time_seconds": wall,
        "outputs": files,
        "results": outcome.results,
    });
    let summary_path = out_dir.join(format!("{}.summary.json", experiment.name));
    let text = serde_json::to_string_pretty(&summary).expect("summary is valid JSON");
    std::fs::write(&summary_path, text + "\n").map_err(|e| CliError::io(&summary_path, e))?;
    if !cli.quiet {
        println!("wrote {}", summary_path.display());
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome.results).expect("results are valid JSON")
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.experiment == "list" {
        list();
        return ExitCode::SUCCESS;
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kaczlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
