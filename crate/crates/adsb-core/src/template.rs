//! Per-aircraft average vectors and pattern variance.

use alloc::string::String;
use alloc::vec::Vec;

use crate::window::{HourSequence, SEQUENCE_LEN};

/// Template vector for one aircraft: the position-wise mean of its
/// sequences, counting only real (unmasked) data.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageVector {
    pub reg: String,
    pub values: Vec<f64>,
    pub n_sequences: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptyInput;

impl core::fmt::Display for EmptyInput {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "no sequences supplied")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EmptyInput {}

/// Position-wise mean over sequences of one aircraft. A position masked
/// in every input stays 0.0.
pub fn compute_average_vector(sequences: &[HourSequence]) -> Result<AverageVector, EmptyInput> {
    let first = sequences.first().ok_or(EmptyInput)?;
    let mut sums = alloc::vec![0.0; SEQUENCE_LEN];
    let mut counts = alloc::vec![0usize; SEQUENCE_LEN];
    for seq in sequences {
        for (i, (&v, &m)) in seq.values.iter().zip(seq.mask.iter()).enumerate() {
            if m {
                sums[i] += v;
                counts[i] += 1;
            }
        }
    }
    let values = sums
        .iter()
        .zip(counts.iter())
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    Ok(AverageVector {
        reg: first.reg.clone(),
        values,
        n_sequences: sequences.len(),
    })
}

/// Mean (over sequences) of the mean squared deviation from the template
/// over each sequence's unmasked positions.
pub fn pattern_variance(
    sequences: &[HourSequence],
    template: &AverageVector,
) -> Result<f64, EmptyInput> {
    if sequences.is_empty() {
        return Err(EmptyInput);
    }
    let mut total = 0.0;
    for seq in sequences {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (i, (&v, &m)) in seq.values.iter().zip(seq.mask.iter()).enumerate() {
            if m {
                let d = v - template.values[i];
                sum += d * d;
                n += 1;
            }
        }
        if n > 0 {
            total += sum / n as f64;
        }
    }
    Ok(total / sequences.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::FEATURE_COUNT;
    use crate::window::BLOCK_COUNT;
    use alloc::vec;

    fn seq(fill: f64, present_blocks: usize) -> HourSequence {
        let mut values = vec![0.0; SEQUENCE_LEN];
        let mut mask = vec![false; SEQUENCE_LEN];
        for b in 0..present_blocks {
            for i in 0..FEATURE_COUNT {
                values[b * FEATURE_COUNT + i] = fill;
                mask[b * FEATURE_COUNT + i] = true;
            }
        }
        HourSequence {
            reg: String::from("N1"),
            hour_start: 0,
            values,
            mask,
            samples_present: present_blocks,
        }
    }

    #[test]
    fn average_of_identical_sequences_is_identity() {
        let s = seq(0.4, BLOCK_COUNT);
        let avg = compute_average_vector(&[s.clone(), s.clone()]).unwrap();
        assert_eq!(avg.values, s.values);
        assert_eq!(avg.n_sequences, 2);
    }

    #[test]
    fn averages_positionwise() {
        let avg = compute_average_vector(&[seq(0.2, BLOCK_COUNT), seq(0.4, BLOCK_COUNT)]).unwrap();
        assert!((avg.values[0] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn always_masked_positions_stay_zero() {
        // Only the first 2 blocks ever carry data.
        let avg = compute_average_vector(&[seq(0.7, 2), seq(0.9, 2)]).unwrap();
        assert!((avg.values[0] - 0.8).abs() < 1e-12);
        assert_eq!(avg.values[5 * FEATURE_COUNT], 0.0);
    }

    #[test]
    fn partial_overlap_counts_per_position() {
        // Position present in one sequence only: mean over that one.
        let avg = compute_average_vector(&[seq(0.6, 4), seq(0.2, 2)]).unwrap();
        assert!((avg.values[0] - 0.4).abs() < 1e-12);
        assert!((avg.values[3 * FEATURE_COUNT] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn permutation_invariant() {
        let a = seq(0.1, 6);
        let b = seq(0.5, 12);
        let c = seq(0.9, 3);
        let x = compute_average_vector(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let y = compute_average_vector(&[c, a, b]).unwrap();
        assert_eq!(x.values, y.values);
    }

    #[test]
    fn zero_variance_when_all_match_template() {
        let s = seq(0.4, BLOCK_COUNT);
        let t = compute_average_vector(std::slice::from_ref(&s)).unwrap();
        assert_eq!(pattern_variance(&[s], &t).unwrap(), 0.0);
    }

    #[test]
    fn uniform_offset_gives_squared_offset() {
        let s = seq(0.4, BLOCK_COUNT);
        let t = compute_average_vector(&[s]).unwrap();
        let shifted = seq(0.5, BLOCK_COUNT);
        let v = pattern_variance(&[shifted], &t).unwrap();
        assert!((v - 0.01).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_two_sequences() {
        let a = seq(0.2, 6);
        let b = seq(0.8, 12);
        let t = compute_average_vector(&[a.clone(), b.clone()]).unwrap();
        let v = pattern_variance(&[a.clone(), b.clone()], &t).unwrap();

        // Independent brute-force computation.
        let mut expected = 0.0;
        for s in [&a, &b] {
            let mut sum = 0.0;
            let mut n = 0;
            for i in 0..SEQUENCE_LEN {
                if s.mask[i] {
                    let d = s.values[i] - t.values[i];
                    sum += d * d;
                    n += 1;
                }
            }
            expected += sum / n as f64;
        }
        expected /= 2.0;
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert_eq!(compute_average_vector(&[]), Err(EmptyInput));
        let t = compute_average_vector(&[seq(0.4, 12)]).unwrap();
        assert_eq!(pattern_variance(&[], &t), Err(EmptyInput));
    }
}
