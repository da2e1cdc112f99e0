//! Ranking input features by how salient the trained encoder finds them.
//!
//! There is no single canonical way to read salience out of an
//! autoencoder, so two standard probes are provided and reported side by
//! side: encoder weight-mass aggregation and mean-ablation importance.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::event::{feature_index, FEATURE_COUNT, FEATURE_NAMES};
use crate::nn::{dataset_mse, DenseParams, ModelParams};
use crate::scaler::{scaled_mean, ScalerStats};
use crate::window::{HourSequence, BLOCK_COUNT};

/// Reference list of fields known to be informative for
/// surveillance-style traffic; selections are compared against it.
pub const REFERENCE_FEATURES: [&str; 10] = [
    "Alt", "Lat", "Long", "PosTime", "Spd", "Trak", "Gnd", "Trt", "Talt", "Ttrk",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreMethod {
    WeightNorm,
    Ablation,
}

impl ScoreMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ScoreMethod::WeightNorm => "weight_norm",
            ScoreMethod::Ablation => "ablation",
        }
    }
}

/// Per-feature importance scores in canonical order; higher is more
/// important.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScores {
    pub method: ScoreMethod,
    pub scores: [f64; FEATURE_COUNT],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScoreError {
    /// Weight-norm scoring needs dense parameters.
    VariantMismatch,
    EmptyDataset,
    /// k outside [1, 17].
    BadK { k: usize },
}

impl fmt::Display for ScoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreError::VariantMismatch => write!(f, "weight-norm scoring needs the dense variant"),
            ScoreError::EmptyDataset => write!(f, "no validation sequences"),
            ScoreError::BadK { k } => write!(f, "k={k} outside [1, 17]"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScoreError {}

/// Aggregate encoder weight mass attached to each feature across all 12
/// time blocks: score[i] = sum over blocks b and hidden units h of
/// |w_enc[h, b*17 + i]|.
pub fn score_by_weight_norm(params: &DenseParams) -> FeatureScores {
    let mut scores = [0.0; FEATURE_COUNT];
    for h in 0..params.w_enc.rows {
        for b in 0..BLOCK_COUNT {
            for (i, score) in scores.iter_mut().enumerate() {
                *score += params.w_enc.get(h, b * FEATURE_COUNT + i).abs();
            }
        }
    }
    FeatureScores {
        method: ScoreMethod::WeightNorm,
        scores,
    }
}

/// Mean-ablation importance: how much the validation MSE rises when a
/// feature's positions are overwritten with that feature's training mean
/// (in scaled space). Ablating with the mean rather than zero keeps the
/// substitute in-distribution.
pub fn score_by_ablation(
    params: &ModelParams,
    validation: &[HourSequence],
    scaler: &ScalerStats,
) -> Result<FeatureScores, ScoreError> {
    if validation.is_empty() {
        return Err(ScoreError::EmptyDataset);
    }
    let baseline = dataset_mse(params, validation, true);
    let mut scores = [0.0; FEATURE_COUNT];
    for (i, score) in scores.iter_mut().enumerate() {
        let fill = scaled_mean(scaler, i);
        let mut total = 0.0;
        for seq in validation {
            let mut ablated = seq.values.clone();
            for b in 0..BLOCK_COUNT {
                let pos = b * FEATURE_COUNT + i;
                if seq.mask[pos] {
                    ablated[pos] = fill;
                }
            }
            let recon = params.reconstruct(&ablated, &seq.mask);
            total += crate::nn::loss_mse(&recon, &seq.values, &seq.mask, true);
        }
        *score = total / validation.len() as f64 - baseline;
    }
    Ok(FeatureScores {
        method: ScoreMethod::Ablation,
        scores,
    })
}

/// Top-k feature names by score, descending; ties go to the lower
/// canonical index.
pub fn select_features(scores: &FeatureScores, k: usize) -> Result<Vec<String>, ScoreError> {
    if !(1..=FEATURE_COUNT).contains(&k) {
        return Err(ScoreError::BadK { k });
    }
    let mut order: Vec<usize> = (0..FEATURE_COUNT).collect();
    order.sort_by(|&a, &b| {
        scores.scores[b]
            .partial_cmp(&scores.scores[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    Ok(order[..k].iter().map(|&i| String::from(FEATURE_NAMES[i])).collect())
}

/// Choose k at the largest consecutive drop in the sorted scores.
pub fn select_by_largest_gap(scores: &FeatureScores) -> Vec<String> {
    let mut sorted: Vec<f64> = scores.scores.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let mut best_k = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 1..FEATURE_COUNT {
        let gap = sorted[k - 1] - sorted[k];
        if gap > best_gap {
            best_gap = gap;
            best_k = k;
        }
    }
    select_features(scores, best_k).expect("k in range by construction")
}

/// Comparison of a selection against the reference feature set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceComparison {
    pub overlap: usize,
    pub agreements: Vec<String>,
    /// Selected but not in the reference set.
    pub false_inclusions: Vec<String>,
    /// In the reference set but not selected.
    pub misses: Vec<String>,
}

pub fn compare_to_reference(selected: &[String]) -> ReferenceComparison {
    let in_ref = |name: &str| REFERENCE_FEATURES.contains(&name);
    let mut agreements: Vec<String> = selected
        .iter()
        .filter(|s| in_ref(s))
        .cloned()
        .collect();
    let mut false_inclusions: Vec<String> = selected
        .iter()
        .filter(|s| !in_ref(s))
        .cloned()
        .collect();
    let mut misses: Vec<String> = REFERENCE_FEATURES
        .iter()
        .filter(|r| !selected.iter().any(|s| s == *r))
        .map(|r| String::from(*r))
        .collect();
    let key = |n: &String| feature_index(n).unwrap_or(FEATURE_COUNT);
    agreements.sort_by_key(key);
    false_inclusions.sort_by_key(key);
    misses.sort_by_key(key);
    ReferenceComparison {
        overlap: agreements.len(),
        agreements,
        false_inclusions,
        misses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Matrix;
    use crate::window::SEQUENCE_LEN;
    use alloc::string::ToString;
    use alloc::vec;

    fn zero_dense() -> DenseParams {
        DenseParams {
            w_enc: Matrix::zeros(FEATURE_COUNT, SEQUENCE_LEN),
            b_enc: vec![0.0; FEATURE_COUNT],
            w_dec: Matrix::zeros(SEQUENCE_LEN, FEATURE_COUNT),
            b_dec: vec![0.0; SEQUENCE_LEN],
        }
    }

    #[test]
    fn weight_mass_localizes_to_touched_feature() {
        let mut p = zero_dense();
        for b in 0..BLOCK_COUNT {
            p.w_enc.set(3, b * FEATURE_COUNT + 5, 0.25);
        }
        let s = score_by_weight_norm(&p);
        assert!(s.scores[5] > 0.0);
        for (i, &v) in s.scores.iter().enumerate() {
            if i != 5 {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn scaling_weights_preserves_ranking() {
        let mut p = DenseParams::init(21);
        let before = score_by_weight_norm(&p);
        let sel_before = select_features(&before, 10).unwrap();
        for w in p.w_enc.data.iter_mut() {
            *w *= 2.0;
        }
        let after = score_by_weight_norm(&p);
        for i in 0..FEATURE_COUNT {
            assert!((after.scores[i] - 2.0 * before.scores[i]).abs() < 1e-12);
        }
        assert_eq!(select_features(&after, 10).unwrap(), sel_before);
    }

    #[test]
    fn weight_scores_match_hand_summation() {
        let mut p = zero_dense();
        p.w_enc.set(0, 0, 1.5); // block 0, feature 0
        p.w_enc.set(2, FEATURE_COUNT + 1, -2.0); // block 1, feature 1
        p.w_enc.set(4, 5 * FEATURE_COUNT + 1, 0.5); // block 5, feature 1
        let s = score_by_weight_norm(&p);
        assert_eq!(s.scores[0], 1.5);
        assert_eq!(s.scores[1], 2.5);
    }

    #[test]
    fn select_orders_and_breaks_ties_by_index() {
        let mut scores = FeatureScores {
            method: ScoreMethod::WeightNorm,
            scores: [0.0; FEATURE_COUNT],
        };
        scores.scores[4] = 3.0;
        scores.scores[9] = 3.0;
        scores.scores[1] = 5.0;
        let sel = select_features(&scores, 3).unwrap();
        assert_eq!(sel, vec!["Cmsgs", "InHG", "SpdTyp"]);
        assert_eq!(select_features(&scores, 17).unwrap().len(), 17);
        assert!(matches!(select_features(&scores, 0), Err(ScoreError::BadK { k: 0 })));
        assert!(matches!(select_features(&scores, 18), Err(ScoreError::BadK { k: 18 })));
    }

    #[test]
    fn reference_set_self_overlap_is_ten() {
        let selected: Vec<String> = REFERENCE_FEATURES.iter().map(|s| s.to_string()).collect();
        let cmp = compare_to_reference(&selected);
        assert_eq!(cmp.overlap, 10);
        assert!(cmp.false_inclusions.is_empty());
        assert!(cmp.misses.is_empty());
    }

    #[test]
    fn overlap_set_arithmetic() {
        let mut selected: Vec<String> = REFERENCE_FEATURES.iter().map(|s| s.to_string()).collect();
        selected.retain(|s| s != "Gnd");
        selected.push("Vsi".to_string());
        let cmp = compare_to_reference(&selected);
        assert_eq!(cmp.overlap, 9);
        assert_eq!(cmp.false_inclusions, vec!["Vsi"]);
        assert_eq!(cmp.misses, vec!["Gnd"]);

        let none = compare_to_reference(&["Tsec".to_string(), "Cmsgs".to_string()]);
        assert_eq!(none.overlap, 0);
    }

    #[test]
    fn largest_gap_selection_is_in_range() {
        let mut scores = FeatureScores {
            method: ScoreMethod::Ablation,
            scores: [0.1; FEATURE_COUNT],
        };
        scores.scores[2] = 9.0;
        scores.scores[7] = 8.5;
        let sel = select_by_largest_gap(&scores);
        assert_eq!(sel, vec!["Alt", "PosTime"]);
    }
}
