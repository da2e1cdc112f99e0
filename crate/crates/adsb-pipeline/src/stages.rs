//! Stage orchestration. Each stage runs standalone from the persisted
//! artifacts of the previous one and writes a manifest next to its
//! primary output.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use adsb_core::event::normalize_angles;
use adsb_core::features::{
    score_by_ablation, score_by_weight_norm, select_by_largest_gap, select_features, ScoreError,
};
use adsb_core::filter::{passes_filter, FilterConfig};
use adsb_core::nn::{train, ModelParams, TrainConfig};
use adsb_core::scaler::{apply_scaler, fit_scaler};
use adsb_core::split::split_dataset;
use adsb_core::track::build_tracks;
use adsb_core::window::{assemble_sequence, sample_window, usability_filter, window_hours};

use crate::config::{variant_name, Method, PipelineConfig};
use crate::formats;
use crate::manifest::{manifest_path_for, write_manifest};
use crate::report::{emit_feature_report, emit_model_report, FeatureReport};
use crate::snapshot::load_snapshot;
use crate::{PipelineError, Result};

fn kv(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

#[derive(Debug)]
pub struct IngestSummary {
    pub snapshot_files: usize,
    pub events_seen: usize,
    pub events_kept: usize,
    pub aircraft: usize,
    pub warnings: Vec<String>,
}

pub struct IngestOptions<'a> {
    pub input: &'a Path,
    pub whitelist: Option<&'a Path>,
    pub require_interesting: bool,
    pub country: &'a str,
    pub interesting_field: &'a str,
    pub out: &'a Path,
}

/// Snapshot files of a directory in name order, or the single given file.
fn snapshot_files(input: &Path) -> Result<Vec<PathBuf>> {
    let meta = std::fs::metadata(input).map_err(|e| PipelineError::io(input, e))?;
    if meta.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(input)
        .map_err(|e| PipelineError::io(input, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(PipelineError::data(format!(
            "{}: no snapshot .json files",
            input.display()
        )));
    }
    Ok(files)
}

fn load_whitelist(path: Option<&Path>) -> Result<BTreeSet<String>> {
    let Some(path) = path else {
        return Ok(BTreeSet::new());
    };
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    Ok(text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_string())
        .collect())
}

pub fn run_ingest(opts: &IngestOptions) -> Result<IngestSummary> {
    let whitelist = load_whitelist(opts.whitelist)?;
    let filter = FilterConfig::new(
        whitelist,
        opts.require_interesting,
        opts.country.to_string(),
    )
    .map_err(|e| PipelineError::Usage(format!("ingest: {e}")))?;

    let files = snapshot_files(opts.input)?;
    let mut warnings = Vec::new();
    let mut events_seen = 0;
    let mut kept = Vec::new();
    for file in &files {
        let load = load_snapshot(file, opts.interesting_field)?;
        warnings.extend(load.warnings);
        events_seen += load.events.len();
        for e in load.events {
            if !passes_filter(&e, &filter) {
                continue;
            }
            match normalize_angles(e) {
                Ok(e) => kept.push(e),
                Err(err) => warnings.push(format!("{}: {err}", file.display())),
            }
        }
    }
    let tracks = build_tracks(kept);
    formats::write_tracks(&tracks, opts.out)?;

    let config = vec![
        kv("country", opts.country),
        kv("interesting_field", opts.interesting_field),
        kv("require_interesting", opts.require_interesting),
        kv(
            "whitelist",
            opts.whitelist.map(|p| p.display().to_string()).unwrap_or_default(),
        ),
    ];
    write_manifest(
        "ingest",
        &config,
        &[],
        &[opts.out],
        &manifest_path_for(opts.out, "ingest"),
    )?;

    Ok(IngestSummary {
        snapshot_files: files.len(),
        events_seen,
        events_kept: tracks.iter().map(|t| t.events.len()).sum(),
        aircraft: tracks.len(),
        warnings,
    })
}

#[derive(Debug)]
pub struct PreprocessSummary {
    pub aircraft: usize,
    pub hours_seen: usize,
    pub sequences_kept: usize,
}

pub fn run_preprocess(
    dataset: &Path,
    seed: u64,
    min_present: usize,
    out_seq: &Path,
    out_scaler: &Path,
) -> Result<PreprocessSummary> {
    let tracks = formats::read_tracks(dataset)?;
    let mut raw = Vec::new();
    let mut hours_seen = 0;
    for track in &tracks {
        for (hour_start, events) in window_hours(&track.events) {
            hours_seen += 1;
            let samples = sample_window(&events, &track.reg, hour_start, seed);
            let seq = assemble_sequence(&samples, &track.reg, hour_start);
            if usability_filter(&seq, min_present) {
                raw.push(seq);
            }
        }
    }
    if raw.is_empty() {
        return Err(PipelineError::data(format!(
            "preprocess: no usable sequences (min_present={min_present}) from {}",
            dataset.display()
        )));
    }
    let stats =
        fit_scaler(&raw).map_err(|e| PipelineError::data(format!("preprocess: {e}")))?;
    let scaled: Vec<_> = raw.iter().map(|s| apply_scaler(s, &stats)).collect();
    formats::write_sequences(&scaled, true, out_seq)?;
    formats::write_scaler(&stats, out_scaler)?;

    let config = vec![kv("min_present", min_present), kv("sample_seed", seed)];
    write_manifest(
        "preprocess",
        &config,
        &[dataset],
        &[out_seq, out_scaler],
        &manifest_path_for(out_seq, "preprocess"),
    )?;

    Ok(PreprocessSummary {
        aircraft: tracks.len(),
        hours_seen,
        sequences_kept: scaled.len(),
    })
}

pub fn run_split(
    sequences: &Path,
    fraction: f64,
    seed: u64,
    group_by_aircraft: bool,
    out_train: &Path,
    out_val: &Path,
) -> Result<(usize, usize)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(PipelineError::Usage(
            "split: fraction must be in (0, 1)".to_string(),
        ));
    }
    let (seqs, scaled) = formats::read_sequences(sequences)?;
    let (train_set, val_set) = split_dataset(seqs, fraction, seed, group_by_aircraft);
    if train_set.is_empty() || val_set.is_empty() {
        return Err(PipelineError::data(format!(
            "split: {} sequences cannot fill both halves at fraction {fraction}",
            train_set.len() + val_set.len()
        )));
    }
    let sizes = (train_set.len(), val_set.len());
    formats::write_sequences(&train_set, scaled, out_train)?;
    formats::write_sequences(&val_set, scaled, out_val)?;

    let config = vec![
        kv("split_fraction", fraction),
        kv("split_seed", seed),
        kv("group_by_aircraft", group_by_aircraft),
    ];
    write_manifest(
        "split",
        &config,
        &[sequences],
        &[out_train, out_val],
        &manifest_path_for(out_train, "split"),
    )?;
    Ok(sizes)
}

#[derive(Debug)]
pub struct TrainSummary {
    pub train_sequences: usize,
    pub val_sequences: usize,
    pub first_train_mse: f64,
    pub final_train_mse: f64,
    pub final_val_mse: f64,
}

pub fn run_train(
    train_path: &Path,
    val_path: Option<&Path>,
    config: &TrainConfig,
    out_model: &Path,
    out_history: &Path,
) -> Result<TrainSummary> {
    let (train_set, val_set) = match val_path {
        Some(vp) => {
            let (t, _) = formats::read_sequences(train_path)?;
            let (v, _) = formats::read_sequences(vp)?;
            (t, v)
        }
        // No validation file: hold out 20% by the training seed.
        None => {
            let (all, _) = formats::read_sequences(train_path)?;
            split_dataset(all, 0.8, config.seed, false)
        }
    };
    let (params, history) = train(&train_set, &val_set, config)
        .map_err(|e| PipelineError::data(format!("train: {e}")))?;
    formats::write_params(&params, out_model)?;
    formats::write_history(&history, out_history)?;

    let cfg = vec![
        kv("variant", variant_name(config.variant)),
        kv("learning_rate", config.learning_rate),
        kv("epochs", config.epochs),
        kv("batch_size", config.batch_size),
        kv("train_seed", config.seed),
        kv("hidden_dim", config.hidden_dim),
    ];
    let mut inputs = vec![train_path];
    inputs.extend(val_path);
    write_manifest(
        "train",
        &cfg,
        &inputs,
        &[out_model, out_history],
        &manifest_path_for(out_model, "train"),
    )?;

    Ok(TrainSummary {
        train_sequences: train_set.len(),
        val_sequences: val_set.len(),
        first_train_mse: history.train_mse.first().copied().unwrap_or(0.0),
        final_train_mse: history.train_mse.last().copied().unwrap_or(0.0),
        final_val_mse: history.val_mse.last().copied().unwrap_or(0.0),
    })
}

fn score_error(e: ScoreError) -> PipelineError {
    match e {
        ScoreError::BadK { .. } => PipelineError::Usage(format!("extract: {e}")),
        _ => PipelineError::data(format!("extract: {e}")),
    }
}

pub struct ExtractOptions<'a> {
    pub model: &'a Path,
    pub sequences: &'a Path,
    pub scaler: &'a Path,
    pub method: Method,
    pub k: usize,
    pub auto_k: bool,
    pub out_dir: &'a Path,
}

pub fn run_extract(opts: &ExtractOptions) -> Result<Vec<String>> {
    let params = formats::read_params(opts.model)?;
    let (sequences, scaled) = formats::read_sequences(opts.sequences)?;
    if !scaled {
        return Err(PipelineError::data(format!(
            "extract: {} holds raw sequences; run preprocess first",
            opts.sequences.display()
        )));
    }
    let stats = formats::read_scaler(opts.scaler)?;

    let wants_weight_norm = matches!(opts.method, Method::WeightNorm | Method::Both);
    let wants_ablation = matches!(opts.method, Method::Ablation | Method::Both);
    let mut scores = Vec::new();
    if wants_weight_norm {
        match &params {
            ModelParams::Dense(p) => scores.push(score_by_weight_norm(p)),
            ModelParams::Lstm(_) if opts.method == Method::WeightNorm => {
                return Err(score_error(ScoreError::VariantMismatch));
            }
            // `both` on an LSTM model falls back to ablation alone.
            ModelParams::Lstm(_) => {}
        }
    }
    if wants_ablation {
        scores.push(score_by_ablation(&params, &sequences, &stats).map_err(score_error)?);
    }
    // Ablation ranks the selection when available: it applies to both
    // variants and measures reconstruction impact directly.
    let ranking = scores.last().expect("at least one score set");
    let selected = if opts.auto_k {
        select_by_largest_gap(ranking)
    } else {
        select_features(ranking, opts.k).map_err(score_error)?
    };
    let ranking_name = ranking.method.name();
    let report = FeatureReport::new(scores, ranking_name, selected.clone());
    emit_feature_report(&report, opts.out_dir)?;

    let cfg = vec![
        kv("method", opts.method.as_str()),
        kv("k", opts.k),
        kv("auto_k", opts.auto_k),
    ];
    write_manifest(
        "extract",
        &cfg,
        &[opts.model, opts.sequences, opts.scaler],
        &[
            &opts.out_dir.join("scores.csv"),
            &opts.out_dir.join("selected.txt"),
            &opts.out_dir.join("comparison.txt"),
        ],
        &opts.out_dir.join("extract.manifest.json"),
    )?;
    Ok(selected)
}

pub fn run_report(model: &Path, sequences: &Path, out_dir: &Path) -> Result<usize> {
    let params = formats::read_params(model)?;
    let (seqs, _) = formats::read_sequences(sequences)?;
    emit_model_report(&params, &seqs, out_dir)?;
    write_manifest(
        "report",
        &[],
        &[model, sequences],
        &[&out_dir.join("report.txt"), &out_dir.join("templates.csv")],
        &out_dir.join("report.manifest.json"),
    )?;
    Ok(seqs.len())
}

#[derive(Debug)]
pub struct PipelineSummary {
    pub ingest: IngestSummary,
    pub sequences: usize,
    pub train_sequences: usize,
    pub val_sequences: usize,
    pub final_val_mse: f64,
    pub selected: Vec<String>,
}

/// All stages in order, artifacts under the workspace directory, one
/// combined manifest at workspace/manifest.json.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineSummary> {
    let ws = &config.workspace;
    std::fs::create_dir_all(ws).map_err(|e| PipelineError::io(ws, e))?;
    let dataset = ws.join("dataset.trk");
    let sequences = ws.join("sequences.seq");
    let scaler = ws.join("scaler.stats");
    let train_seq = ws.join("train.seq");
    let val_seq = ws.join("val.seq");
    let model = ws.join("model.params");
    let history = ws.join("history.csv");
    let report_dir = ws.join("report");

    let ingest = run_ingest(&IngestOptions {
        input: &config.input,
        whitelist: config.whitelist.as_deref(),
        require_interesting: config.require_interesting,
        country: &config.country,
        interesting_field: &config.interesting_field,
        out: &dataset,
    })?;
    let pre = run_preprocess(
        &dataset,
        config.sample_seed,
        config.min_present,
        &sequences,
        &scaler,
    )?;
    let (n_train, n_val) = run_split(
        &sequences,
        config.split_fraction,
        config.split_seed,
        config.group_by_aircraft,
        &train_seq,
        &val_seq,
    )?;
    let train_config = TrainConfig {
        variant: config.variant,
        learning_rate: config.learning_rate,
        epochs: config.epochs,
        batch_size: config.batch_size,
        seed: config.train_seed,
        mask_loss: true,
        hidden_dim: config.hidden_dim,
    };
    let train_summary = run_train(&train_seq, Some(&val_seq), &train_config, &model, &history)?;
    let selected = run_extract(&ExtractOptions {
        model: &model,
        sequences: &val_seq,
        scaler: &scaler,
        method: config.method,
        k: config.k,
        auto_k: config.auto_k,
        out_dir: &report_dir,
    })?;
    run_report(&model, &val_seq, &report_dir)?;

    write_manifest(
        "pipeline",
        &config.snapshot(),
        &[],
        &[
            &dataset,
            &sequences,
            &scaler,
            &train_seq,
            &val_seq,
            &model,
            &history,
            &report_dir.join("scores.csv"),
            &report_dir.join("selected.txt"),
            &report_dir.join("comparison.txt"),
            &report_dir.join("report.txt"),
            &report_dir.join("templates.csv"),
        ],
        &ws.join("manifest.json"),
    )?;

    Ok(PipelineSummary {
        ingest,
        sequences: pre.sequences_kept,
        train_sequences: n_train,
        val_sequences: n_val,
        final_val_mse: train_summary.final_val_mse,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::generate_fixture;

    fn small_config(root: &Path) -> PipelineConfig {
        PipelineConfig {
            input: root.join("snapshots"),
            workspace: root.join("workspace"),
            whitelist: Some(root.join("whitelist.txt")),
            min_present: 4,
            epochs: 5,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn pipeline_runs_end_to_end_on_the_fixture() {
        let dir = tempfile::tempdir().unwrap();
        generate_fixture(dir.path(), 4, 2, 11).unwrap();
        let config = small_config(dir.path());
        let summary = run_pipeline(&config).unwrap();
        // 2 interesting + 1 whitelisted of 4 aircraft.
        assert_eq!(summary.ingest.aircraft, 3);
        assert!(summary.sequences >= 4, "kept {}", summary.sequences);
        assert_eq!(summary.selected.len(), 10);
        for artifact in [
            "dataset.trk",
            "sequences.seq",
            "scaler.stats",
            "train.seq",
            "val.seq",
            "model.params",
            "history.csv",
            "manifest.json",
            "report/scores.csv",
            "report/selected.txt",
            "report/comparison.txt",
            "report/report.txt",
            "report/templates.csv",
        ] {
            assert!(
                config.workspace.join(artifact).exists(),
                "missing {artifact}"
            );
        }
    }

    #[test]
    fn stages_rerun_standalone_from_persisted_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        generate_fixture(dir.path(), 4, 2, 11).unwrap();
        let config = small_config(dir.path());
        run_pipeline(&config).unwrap();

        let ws = &config.workspace;
        let (n_train, n_val) = run_split(
            &ws.join("sequences.seq"),
            0.8,
            42,
            false,
            &ws.join("t2.seq"),
            &ws.join("v2.seq"),
        )
        .unwrap();
        assert!(n_train > 0 && n_val > 0);
        let selected = run_extract(&ExtractOptions {
            model: &ws.join("model.params"),
            sequences: &ws.join("v2.seq"),
            scaler: &ws.join("scaler.stats"),
            method: Method::Both,
            k: 6,
            auto_k: false,
            out_dir: &ws.join("report2"),
        })
        .unwrap();
        assert_eq!(selected.len(), 6);
    }

    #[test]
    fn missing_input_dir_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_ingest(&IngestOptions {
            input: &dir.path().join("nope"),
            whitelist: None,
            require_interesting: true,
            country: "United States",
            interesting_field: "Interested",
            out: &dir.path().join("out.trk"),
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn unsatisfiable_filter_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        generate_fixture(dir.path(), 1, 1, 3).unwrap();
        let err = run_ingest(&IngestOptions {
            input: &dir.path().join("snapshots"),
            whitelist: None,
            require_interesting: false,
            country: "United States",
            interesting_field: "Interested",
            out: &dir.path().join("out.trk"),
        })
        .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn preprocess_with_impossible_threshold_is_data_error() {
        let dir = tempfile::tempdir().unwrap();
        generate_fixture(dir.path(), 2, 1, 3).unwrap();
        let dataset = dir.path().join("dataset.trk");
        run_ingest(&IngestOptions {
            input: &dir.path().join("snapshots"),
            whitelist: Some(&dir.path().join("whitelist.txt")),
            require_interesting: true,
            country: "United States",
            interesting_field: "Interested",
            out: &dataset,
        })
        .unwrap();
        let err = run_preprocess(
            &dataset,
            42,
            13, // more than 12 buckets can ever be present
            &dir.path().join("s.seq"),
            &dir.path().join("s.stats"),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
