//! Per-feature standardization with a [0,1] squash.
//!
//! Features are first standardized by their mean and standard deviation,
//! then mapped to [0,1] by the training-set min/max of the standardized
//! values. The sigmoid output layer needs bounded targets, so the z-score
//! alone is not enough.

use core::fmt;

use libm::sqrt;

use crate::event::FEATURE_COUNT;
use crate::window::HourSequence;

const STD_FLOOR: f64 = 1e-8;

/// Fitted scaler state, one row per canonical feature.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerStats {
    pub mean: [f64; FEATURE_COUNT],
    /// Population standard deviation, floored: values below 1e-8 are
    /// replaced by 1.0 so constant features stay finite.
    pub std: [f64; FEATURE_COUNT],
    /// Min of standardized unmasked training values per feature.
    pub post_min: [f64; FEATURE_COUNT],
    /// Max of standardized unmasked training values per feature.
    pub post_max: [f64; FEATURE_COUNT],
    /// Events (unmasked blocks) that contributed to the fit.
    pub fitted_on: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalerError {
    /// No unmasked block anywhere in the training set.
    EmptyDataset,
    /// Inversion requested for a feature whose training range collapsed.
    DegenerateRange { feature: usize },
    /// mean_location called on no points.
    EmptyInput,
}

impl fmt::Display for ScalerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalerError::EmptyDataset => write!(f, "no unmasked data to fit scaler"),
            ScalerError::DegenerateRange { feature } => {
                write!(f, "feature {feature} has a degenerate training range")
            }
            ScalerError::EmptyInput => write!(f, "empty input"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScalerError {}

/// Kahan compensated accumulator; keeps reductions deterministic and
/// accurate regardless of how the input is partitioned.
#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Fit per-feature mean/std over unmasked blocks of the training set.
pub fn fit_scaler(sequences: &[HourSequence]) -> Result<ScalerStats, ScalerError> {
    let mut count = 0usize;
    let mut sums = [Kahan::default(); FEATURE_COUNT];
    for seq in sequences {
        for (i, (&v, &m)) in seq.values.iter().zip(seq.mask.iter()).enumerate() {
            if m {
                sums[i % FEATURE_COUNT].add(v);
                if i % FEATURE_COUNT == 0 {
                    count += 1;
                }
            }
        }
    }
    if count == 0 {
        return Err(ScalerError::EmptyDataset);
    }
    let n = count as f64;
    let mut mean = [0.0; FEATURE_COUNT];
    for i in 0..FEATURE_COUNT {
        mean[i] = sums[i].sum / n;
    }

    let mut sq = [Kahan::default(); FEATURE_COUNT];
    for seq in sequences {
        for (i, (&v, &m)) in seq.values.iter().zip(seq.mask.iter()).enumerate() {
            if m {
                let f = i % FEATURE_COUNT;
                let d = v - mean[f];
                sq[f].add(d * d);
            }
        }
    }
    let mut std = [0.0; FEATURE_COUNT];
    for i in 0..FEATURE_COUNT {
        let s = sqrt(sq[i].sum / n);
        std[i] = if s < STD_FLOOR { 1.0 } else { s };
    }

    let mut post_min = [f64::INFINITY; FEATURE_COUNT];
    let mut post_max = [f64::NEG_INFINITY; FEATURE_COUNT];
    for seq in sequences {
        for (i, (&v, &m)) in seq.values.iter().zip(seq.mask.iter()).enumerate() {
            if m {
                let f = i % FEATURE_COUNT;
                let z = (v - mean[f]) / std[f];
                if z < post_min[f] {
                    post_min[f] = z;
                }
                if z > post_max[f] {
                    post_max[f] = z;
                }
            }
        }
    }

    Ok(ScalerStats {
        mean,
        std,
        post_min,
        post_max,
        fitted_on: count,
    })
}

/// Scale a single raw value for feature `i` into [0,1].
pub fn scale_value(v: f64, s: &ScalerStats, i: usize) -> f64 {
    let z = (v - s.mean[i]) / s.std[i];
    let range = s.post_max[i] - s.post_min[i];
    if range == 0.0 {
        return 0.5;
    }
    let u = (z - s.post_min[i]) / range;
    u.clamp(0.0, 1.0)
}

/// Scaled representation of the training mean (z = 0) of feature `i`.
pub fn scaled_mean(s: &ScalerStats, i: usize) -> f64 {
    let range = s.post_max[i] - s.post_min[i];
    if range == 0.0 {
        return 0.5;
    }
    ((0.0 - s.post_min[i]) / range).clamp(0.0, 1.0)
}

/// Apply the fitted scaler to a sequence. Masked positions stay 0.0.
pub fn apply_scaler(seq: &HourSequence, s: &ScalerStats) -> HourSequence {
    let mut out = seq.clone();
    for (i, (v, &m)) in out.values.iter_mut().zip(seq.mask.iter()).enumerate() {
        if m {
            *v = scale_value(*v, s, i % FEATURE_COUNT);
        }
    }
    out
}

/// Map a scaled value back to raw feature units.
pub fn invert_scaler(u: f64, s: &ScalerStats, i: usize) -> Result<f64, ScalerError> {
    let range = s.post_max[i] - s.post_min[i];
    if range == 0.0 {
        return Err(ScalerError::DegenerateRange { feature: i });
    }
    let z = u * range + s.post_min[i];
    Ok(z * s.std[i] + s.mean[i])
}

/// Component-wise arithmetic mean of (lat, long) points in degrees.
///
/// This is the plain mean, which is known to be wrong across the
/// antimeridian; callers working near the poles need a Cartesian
/// formulation instead.
pub fn mean_location(points: &[(f64, f64)]) -> Result<(f64, f64), ScalerError> {
    if points.is_empty() {
        return Err(ScalerError::EmptyInput);
    }
    let mut lat = Kahan::default();
    let mut long = Kahan::default();
    for &(la, lo) in points {
        lat.add(la);
        long.add(lo);
    }
    let n = points.len() as f64;
    Ok((lat.sum / n, long.sum / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::window::{BLOCK_COUNT, SEQUENCE_LEN};
    use alloc::string::String;
    use alloc::vec;

    fn seq_from_blocks(blocks: &[Option<[f64; FEATURE_COUNT]>]) -> HourSequence {
        assert_eq!(blocks.len(), BLOCK_COUNT);
        let mut values = vec![0.0; SEQUENCE_LEN];
        let mut mask = vec![false; SEQUENCE_LEN];
        let mut present = 0;
        for (b, blk) in blocks.iter().enumerate() {
            if let Some(vals) = blk {
                values[b * FEATURE_COUNT..(b + 1) * FEATURE_COUNT].copy_from_slice(vals);
                mask[b * FEATURE_COUNT..(b + 1) * FEATURE_COUNT].fill(true);
                present += 1;
            }
        }
        HourSequence {
            reg: String::from("N1"),
            hour_start: 0,
            values,
            mask,
            samples_present: present,
        }
    }

    fn three_event_seq(feature0: [f64; 3]) -> HourSequence {
        let mut blocks: alloc::vec::Vec<Option<[f64; FEATURE_COUNT]>> = vec![None; BLOCK_COUNT];
        for (b, v) in feature0.iter().enumerate() {
            let mut block = [5.0; FEATURE_COUNT];
            block[0] = *v;
            blocks[b] = Some(block);
        }
        seq_from_blocks(&blocks)
    }

    #[test]
    fn population_std_of_one_two_three() {
        // Hand-computed: mean 2, population std sqrt(2/3).
        let s = fit_scaler(&[three_event_seq([1.0, 2.0, 3.0])]).unwrap();
        assert!((s.mean[0] - 2.0).abs() < 1e-12);
        assert!((s.std[0] - sqrt(2.0 / 3.0)).abs() < 1e-12);
        assert!((s.std[0] - 0.81650).abs() < 1e-5);
        assert_eq!(s.fitted_on, 3);
    }

    #[test]
    fn constant_feature_floors_std_and_maps_to_half() {
        let seq = three_event_seq([1.0, 2.0, 3.0]);
        let s = fit_scaler(std::slice::from_ref(&seq)).unwrap();
        // Feature 1 is constant 5.0 in every block.
        assert_eq!(s.std[1], 1.0);
        let scaled = apply_scaler(&seq, &s);
        for b in 0..3 {
            assert_eq!(scaled.values[b * FEATURE_COUNT + 1], 0.5);
        }
    }

    #[test]
    fn fully_masked_dataset_is_empty() {
        let seq = seq_from_blocks(&vec![None; BLOCK_COUNT]);
        assert_eq!(fit_scaler(&[seq]), Err(ScalerError::EmptyDataset));
    }

    #[test]
    fn training_extremes_hit_exact_endpoints() {
        let seq = three_event_seq([1.0, 2.0, 3.0]);
        let s = fit_scaler(std::slice::from_ref(&seq)).unwrap();
        let scaled = apply_scaler(&seq, &s);
        let f0: alloc::vec::Vec<f64> = (0..3).map(|b| scaled.values[b * FEATURE_COUNT]).collect();
        assert_eq!(f0[0], 0.0);
        assert_eq!(f0[2], 1.0);
        assert!((f0[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_values_clamp() {
        let s = fit_scaler(&[three_event_seq([1.0, 2.0, 3.0])]).unwrap();
        assert_eq!(scale_value(-100.0, &s, 0), 0.0);
        assert_eq!(scale_value(100.0, &s, 0), 1.0);
    }

    #[test]
    fn invert_round_trips() {
        let s = fit_scaler(&[three_event_seq([1.0, 2.0, 3.7])]).unwrap();
        let u = scale_value(3.7, &s, 0);
        let v = invert_scaler(u, &s, 0).unwrap();
        assert!((v - 3.7).abs() <= 1e-9 * 3.7);
        // Degenerate feature refuses inversion.
        assert!(matches!(
            invert_scaler(0.5, &s, 1),
            Err(ScalerError::DegenerateRange { feature: 1 })
        ));
    }

    #[test]
    fn masked_positions_untouched_by_apply() {
        let seq = three_event_seq([1.0, 2.0, 3.0]);
        let s = fit_scaler(std::slice::from_ref(&seq)).unwrap();
        let scaled = apply_scaler(&seq, &s);
        for (i, &m) in scaled.mask.iter().enumerate() {
            if !m {
                assert_eq!(scaled.values[i], 0.0);
            }
        }
        assert_eq!(scaled.mask, seq.mask);
    }

    #[test]
    fn mean_location_cases() {
        assert_eq!(
            mean_location(&[(40.0, -74.0), (42.0, -76.0)]).unwrap(),
            (41.0, -75.0)
        );
        assert_eq!(mean_location(&[(12.5, 3.25)]).unwrap(), (12.5, 3.25));
        // Known artifact of the arithmetic mean at the antimeridian.
        assert_eq!(mean_location(&[(0.0, 179.0), (0.0, -179.0)]).unwrap(), (0.0, 0.0));
        assert_eq!(mean_location(&[]), Err(ScalerError::EmptyInput));
    }
}
