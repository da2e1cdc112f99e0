//! Human-readable and machine-readable reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use adsb_core::event::FEATURE_NAMES;
use adsb_core::features::{
    compare_to_reference, FeatureScores, ReferenceComparison, REFERENCE_FEATURES,
};
use adsb_core::nn::{dataset_mse, ModelParams};
use adsb_core::template::{compute_average_vector, pattern_variance};
use adsb_core::window::HourSequence;

use crate::{PipelineError, Result};

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

/// Feature-importance report: all computed score sets plus the ranked
/// selection drawn from one of them.
pub struct FeatureReport {
    pub scores: Vec<FeatureScores>,
    /// Method the selection was ranked by.
    pub selection_method: &'static str,
    pub selected: Vec<String>,
    pub comparison: ReferenceComparison,
}

impl FeatureReport {
    pub fn new(scores: Vec<FeatureScores>, selection_method: &'static str, selected: Vec<String>) -> Self {
        let comparison = compare_to_reference(&selected);
        FeatureReport {
            scores,
            selection_method,
            selected,
            comparison,
        }
    }
}

/// Emit `scores.csv`, `selected.txt`, and `comparison.txt` into `dir`.
pub fn emit_feature_report(report: &FeatureReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;

    let mut csv = String::from("feature,method,score\n");
    for set in &report.scores {
        for (i, name) in FEATURE_NAMES.iter().enumerate() {
            let _ = writeln!(csv, "{},{},{}", name, set.method.name(), set.scores[i]);
        }
    }
    write_text(&dir.join("scores.csv"), &csv)?;

    let mut sel = String::new();
    for name in &report.selected {
        let _ = writeln!(sel, "{name}");
    }
    write_text(&dir.join("selected.txt"), &sel)?;

    let mut cmp = String::new();
    let _ = writeln!(cmp, "selection method: {}", report.selection_method);
    let _ = writeln!(cmp, "selected: {}", report.selected.len());
    let _ = writeln!(
        cmp,
        "reference set ({}): {}",
        REFERENCE_FEATURES.len(),
        REFERENCE_FEATURES.join(", ")
    );
    let _ = writeln!(cmp, "overlap: {}", report.comparison.overlap);
    let _ = writeln!(cmp, "agreements: {}", report.comparison.agreements.join(", "));
    let _ = writeln!(
        cmp,
        "selected but not in reference: {}",
        report.comparison.false_inclusions.join(", ")
    );
    let _ = writeln!(
        cmp,
        "in reference but not selected: {}",
        report.comparison.misses.join(", ")
    );
    write_text(&dir.join("comparison.txt"), &cmp)
}

/// Emit `report.txt` and `templates.csv` into `dir`: reconstruction
/// quality plus one average-vector template per aircraft.
pub fn emit_model_report(
    params: &ModelParams,
    sequences: &[HourSequence],
    dir: &Path,
) -> Result<()> {
    if sequences.is_empty() {
        return Err(PipelineError::data("report: no sequences supplied"));
    }
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;

    let mut by_reg: BTreeMap<&str, Vec<HourSequence>> = BTreeMap::new();
    for s in sequences {
        by_reg.entry(s.reg.as_str()).or_default().push(s.clone());
    }

    let mse = dataset_mse(params, sequences, true);
    let mut txt = String::new();
    let _ = writeln!(txt, "sequences: {}", sequences.len());
    let _ = writeln!(txt, "aircraft: {}", by_reg.len());
    let _ = writeln!(txt, "masked reconstruction mse: {mse}");
    let _ = writeln!(txt);
    let _ = writeln!(txt, "per-aircraft pattern variance around the average vector:");

    let mut csv = String::from("reg,n_sequences,pattern_variance,values\n");
    for (reg, seqs) in &by_reg {
        let template = compute_average_vector(seqs)
            .map_err(|e| PipelineError::data(format!("report: {reg}: {e}")))?;
        let variance = pattern_variance(seqs, &template)
            .map_err(|e| PipelineError::data(format!("report: {reg}: {e}")))?;
        let _ = writeln!(txt, "  {reg}: {} sequences, variance {variance}", seqs.len());
        let values: Vec<String> = template.values.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            reg,
            template.n_sequences,
            variance,
            values.join(" ")
        );
    }
    write_text(&dir.join("report.txt"), &txt)?;
    write_text(&dir.join("templates.csv"), &csv)
}
