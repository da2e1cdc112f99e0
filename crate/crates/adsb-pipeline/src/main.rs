use std::path::PathBuf;
use std::process::ExitCode;

use adsb_core::nn::TrainConfig;
use clap::{Args, Parser, Subcommand};

use adsb_pipeline::config::{parse_variant, Method, PipelineConfig};
use adsb_pipeline::fixture::generate_fixture;
use adsb_pipeline::stages::{
    run_extract, run_ingest, run_pipeline, run_preprocess, run_report, run_split, run_train,
    ExtractOptions, IngestOptions,
};
use adsb_pipeline::{PipelineError, Result};

/// Learn salient flight-telemetry features with an autoencoder:
/// ingest aircraft snapshots, build hourly sequences, train, and rank
/// the 17 input features by encoder salience.
#[derive(Parser)]
#[command(name = "adsb-pipeline", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic snapshot dataset plus whitelist
    Fixture(FixtureArgs),
    /// Parse snapshots, filter aircraft, and write the event dataset
    Ingest(IngestArgs),
    /// Sample hourly sequences from the event dataset and scale them
    Preprocess(PreprocessArgs),
    /// Split a sequence file into train and validation halves
    Split(SplitArgs),
    /// Train an autoencoder on scaled sequences
    Train(TrainArgs),
    /// Score and select input features with a trained model
    Extract(ExtractArgs),
    /// Reconstruction quality and per-aircraft templates
    Report(ReportArgs),
    /// All stages in order from a config file
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct FixtureArgs {
    /// Output directory (receives snapshots/ and whitelist.txt)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    aircraft: usize,
    #[arg(long, default_value_t = 3)]
    hours: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct IngestArgs {
    /// Snapshot directory or single snapshot file
    #[arg(long)]
    input: PathBuf,
    /// Registration whitelist, one per line
    #[arg(long)]
    whitelist: Option<PathBuf>,
    /// Also keep aircraft carrying the interesting flag
    #[arg(long, default_value_t = false)]
    require_interesting: bool,
    #[arg(long, default_value = "United States")]
    country: String,
    /// JSON field name of the interesting flag
    #[arg(long, default_value = "Interested")]
    interesting_field: String,
    /// Output event dataset (.trk)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Event dataset from ingest (.trk)
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Minimum non-empty 5-minute buckets per kept hour
    #[arg(long, default_value_t = 6)]
    min_present: usize,
    /// Output scaled sequence file (.seq)
    #[arg(long)]
    out: PathBuf,
    /// Output scaler statistics file
    #[arg(long)]
    scaler: PathBuf,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    sequences: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Keep each aircraft entirely on one side
    #[arg(long, default_value_t = false)]
    group_by_aircraft: bool,
    #[arg(long)]
    out_train: PathBuf,
    #[arg(long)]
    out_val: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Scaled training sequences (.seq)
    #[arg(long)]
    sequences: PathBuf,
    /// Scaled validation sequences; omitted: 20% held out internally
    #[arg(long)]
    val: Option<PathBuf>,
    /// dense or lstm
    #[arg(long, default_value = "dense")]
    variant: String,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    batch: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Hidden width of the lstm variant
    #[arg(long, default_value_t = 17)]
    hidden_dim: usize,
    /// Output model parameters
    #[arg(long)]
    out: PathBuf,
    /// Output per-epoch loss CSV
    #[arg(long)]
    history: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    model: PathBuf,
    /// Scaled sequences to score against (.seq)
    #[arg(long)]
    sequences: PathBuf,
    #[arg(long)]
    scaler: PathBuf,
    /// weight-norm, ablation, or both
    #[arg(long, default_value = "both")]
    method: String,
    /// How many features to select
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Pick k at the largest drop in sorted scores instead
    #[arg(long, default_value_t = false)]
    auto_k: bool,
    /// Output report directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    sequences: PathBuf,
    /// Output report directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// key=value run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any config key, repeatable (e.g. --set epochs=50)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Override the input snapshot directory
    #[arg(long)]
    input: Option<PathBuf>,
    /// Override the workspace directory
    #[arg(long)]
    workspace: Option<PathBuf>,
}

fn stage_of(command: &Command) -> &'static str {
    match command {
        Command::Fixture(_) => "fixture",
        Command::Ingest(_) => "ingest",
        Command::Preprocess(_) => "preprocess",
        Command::Split(_) => "split",
        Command::Train(_) => "train",
        Command::Extract(_) => "extract",
        Command::Report(_) => "report",
        Command::Pipeline(_) => "pipeline",
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Fixture(a) => {
            let summary = generate_fixture(&a.out, a.aircraft, a.hours, a.seed)?;
            println!(
                "fixture: {} snapshot files, {} aircraft, {} whitelisted, in {}",
                summary.snapshot_files,
                summary.aircraft,
                summary.whitelisted,
                a.out.display()
            );
        }
        Command::Ingest(a) => {
            let summary = run_ingest(&IngestOptions {
                input: &a.input,
                whitelist: a.whitelist.as_deref(),
                require_interesting: a.require_interesting,
                country: &a.country,
                interesting_field: &a.interesting_field,
                out: &a.out,
            })?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "ingest: {} files, {} events seen, {} kept across {} aircraft -> {}",
                summary.snapshot_files,
                summary.events_seen,
                summary.events_kept,
                summary.aircraft,
                a.out.display()
            );
        }
        Command::Preprocess(a) => {
            let summary =
                run_preprocess(&a.dataset, a.seed, a.min_present, &a.out, &a.scaler)?;
            println!(
                "preprocess: {} aircraft, {} hours, {} sequences kept -> {}",
                summary.aircraft,
                summary.hours_seen,
                summary.sequences_kept,
                a.out.display()
            );
        }
        Command::Split(a) => {
            let (n_train, n_val) = run_split(
                &a.sequences,
                a.fraction,
                a.seed,
                a.group_by_aircraft,
                &a.out_train,
                &a.out_val,
            )?;
            println!("split: {n_train} train / {n_val} validation");
        }
        Command::Train(a) => {
            let config = TrainConfig {
                variant: parse_variant(&a.variant)?,
                learning_rate: a.lr,
                epochs: a.epochs,
                batch_size: a.batch,
                seed: a.seed,
                mask_loss: true,
                hidden_dim: a.hidden_dim,
            };
            let summary =
                run_train(&a.sequences, a.val.as_deref(), &config, &a.out, &a.history)?;
            println!(
                "train: {} train / {} val sequences, mse {} -> {} (val {})",
                summary.train_sequences,
                summary.val_sequences,
                summary.first_train_mse,
                summary.final_train_mse,
                summary.final_val_mse
            );
        }
        Command::Extract(a) => {
            let selected = run_extract(&ExtractOptions {
                model: &a.model,
                sequences: &a.sequences,
                scaler: &a.scaler,
                method: Method::parse(&a.method)?,
                k: a.k,
                auto_k: a.auto_k,
                out_dir: &a.out,
            })?;
            println!("extract: selected {} -> {}", selected.join(", "), a.out.display());
        }
        Command::Report(a) => {
            let n = run_report(&a.model, &a.sequences, &a.out)?;
            println!("report: {n} sequences -> {}", a.out.display());
        }
        Command::Pipeline(a) => {
            let mut config = match &a.config {
                Some(path) => PipelineConfig::load(path)?,
                None => PipelineConfig::default(),
            };
            if let Some(input) = a.input {
                config.input = input;
            }
            if let Some(workspace) = a.workspace {
                config.workspace = workspace;
            }
            for kv in &a.set {
                let (key, value) = kv.split_once('=').ok_or_else(|| {
                    PipelineError::Usage(format!("--set expects KEY=VALUE, got `{kv}`"))
                })?;
                config.set(key, value)?;
            }
            let summary = run_pipeline(&config)?;
            for w in &summary.ingest.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "pipeline: {} sequences ({} train / {} val), final val mse {}",
                summary.sequences,
                summary.train_sequences,
                summary.val_sequences,
                summary.final_val_mse
            );
            println!(
                "pipeline: selected {} -> {}",
                summary.selected.join(", "),
                config.workspace.join("report").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let stage = stage_of(&cli.command);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{stage}: error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
