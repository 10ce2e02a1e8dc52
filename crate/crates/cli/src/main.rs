use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use ganaug::cgan::Experiment;
use ganaug::district::{Catalog, ReferenceModel};
use ganaug::harness::{
    emit_plots, generate_stage, load_archive, load_trained, optimize, run_experiment, train_stage, write_summary,
    Harness, HarnessConfig, HarnessError, PlotData, ReportRow,
};

/// GA archive augmentation with a conditional GAN.
#[derive(Debug, Parser)]
#[command(name = "ganaug", version)]
struct Cli {
    /// TOML settings file; unspecified keys take the desk defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Full-size settings (128 × 512 GA, long GAN runs, full pools).
    #[arg(long, global = true)]
    full_scale: bool,
    /// Technology catalog replacing the bundled one.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the GA and write archive.csv.
    Optimize,
    /// Filter the archive and train both GAN runs.
    Train { experiment: Target },
    /// Generate from trained snapshots, vet and report.
    Generate { experiment: Target },
    /// Train, generate, vet, report and plot; runs the GA first if needed.
    Experiment { experiment: Target },
    /// Collect per-experiment rows into <out>/report.csv.
    Report,
    /// Rewrite plot files from an experiment's persisted outputs.
    Plots { experiment: Target },
}

/// An experiment name, or `all`.
#[derive(Clone, Debug)]
struct Target(Vec<Experiment>);

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Target(Experiment::ALL.to_vec()));
        }
        s.parse::<Experiment>().map(|e| Target(vec![e])).map_err(|_| {
            let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
            format!("unknown experiment {s:?}; expected one of {} or all", names.join(", "))
        })
    }
}

fn harness(cli: &Cli) -> anyhow::Result<Harness> {
    let mut config = match &cli.config {
        Some(path) => HarnessConfig::from_path(path)?,
        None if cli.full_scale => HarnessConfig::full_scale(),
        None => HarnessConfig::desk(),
    };
    if cli.config.is_some() && cli.full_scale {
        log::warn!("--config given; ignoring --full-scale");
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let catalog = match &cli.catalog {
        Some(path) => Catalog::from_path(path)?,
        None => Catalog::reference(),
    };
    let h = Harness::new(config, &cli.out, ReferenceModel::new(catalog))?;
    std::fs::create_dir_all(&h.out_dir).with_context(|| format!("creating {}", h.out_dir.display()))?;
    std::fs::write(h.out_dir.join("config.toml"), h.config.to_toml())
        .with_context(|| format!("writing {}", h.out_dir.join("config.toml").display()))?;
    Ok(h)
}

fn print_row(r: &ReportRow) {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    println!(
        "{:<20} train {:>6} pool {:>6} gen {:>6} admissible {:>8} | hv {:.4} -> {} ({}%)",
        r.experiment.name(),
        r.train_count,
        r.pool_count,
        r.gen_count,
        cell(r.admissible),
        r.hypervolume.train,
        cell(r.hypervolume.gen),
        cell(r.hypervolume.improved),
    );
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let h = harness(cli)?;
    match &cli.command {
        Command::Optimize => {
            let ga = optimize(&h)?;
            println!("archive: {} solutions in {:.2} s", ga.archive.len(), ga.seconds);
        }
        Command::Train { experiment } => {
            let (archive, _) = load_archive(&h)?;
            for &e in &experiment.0 {
                let t = train_stage(&h, e, &archive)?;
                for r in &t.runs {
                    println!(
                        "{e}: {} run, {} iterations, {} of {} snapshots selected",
                        r.kind,
                        r.iterations,
                        r.selected.len(),
                        r.snapshots.len()
                    );
                }
            }
        }
        Command::Generate { experiment } => {
            let (archive, ga_seconds) = load_archive(&h)?;
            for &e in &experiment.0 {
                let trained = load_trained(&h, e)?;
                let report = generate_stage(&h, &trained, &archive, ga_seconds)?;
                emit_plots(&PlotData::from_report(&report), &h.experiment_dir(e).join("plots"))
                    .map_err(|err| HarnessError::Stage { stage: "plots", error: Box::new(err) })?;
                print_row(&report.row);
            }
        }
        Command::Experiment { experiment } => {
            for &e in &experiment.0 {
                let report = run_experiment(&h, e)?;
                print_row(&report.row);
                if let Some(ratio) = report.runtime_ratio {
                    println!("{e}: GAN/GA runtime ratio {ratio:.4}");
                }
            }
        }
        Command::Report => {
            let rows = write_summary(&h)?;
            for r in &rows {
                print_row(r);
            }
            println!("{} rows written to {}", rows.len(), h.out_dir.join("report.csv").display());
        }
        Command::Plots { experiment } => {
            for &e in &experiment.0 {
                let dir = h.experiment_dir(e);
                let data =
                    PlotData::load(&dir).map_err(|err| HarnessError::Stage { stage: "plots", error: Box::new(err) })?;
                let files = emit_plots(&data, &dir.join("plots"))
                    .map_err(|err| HarnessError::Stage { stage: "plots", error: Box::new(err) })?;
                println!("{e}: {} plot files", files.len());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let stage = err.downcast_ref::<HarnessError>().and_then(HarnessError::stage).unwrap_or("setup");
            eprintln!("ganaug: stage {stage} failed: {err:#}");
            ExitCode::FAILURE
        }
    }
}
