//! Deterministic train/validation splitting.

use alloc::vec::Vec;

use crate::rng::{shuffle, SplitMix64};
use crate::window::HourSequence;

/// Shuffle by seed and split; |train| = round(train_fraction * N).
///
/// The two halves are disjoint and cover the input. With
/// `group_by_aircraft`, whole registrations are assigned to one side so
/// no aircraft appears in both (the fraction then applies to sequence
/// counts as closely as whole groups allow).
pub fn split_dataset(
    sequences: Vec<HourSequence>,
    train_fraction: f64,
    seed: u64,
    group_by_aircraft: bool,
) -> (Vec<HourSequence>, Vec<HourSequence>) {
    assert!(
        train_fraction > 0.0 && train_fraction < 1.0,
        "train_fraction must be in (0, 1)"
    );
    if group_by_aircraft {
        split_grouped(sequences, train_fraction, seed)
    } else {
        let mut seqs = sequences;
        let mut rng = SplitMix64::new(seed);
        shuffle(&mut seqs, &mut rng);
        let n_train = round_count(seqs.len(), train_fraction);
        let val = seqs.split_off(n_train);
        (seqs, val)
    }
}

fn round_count(n: usize, fraction: f64) -> usize {
    let c = libm::round(n as f64 * fraction) as usize;
    c.min(n)
}

fn split_grouped(
    sequences: Vec<HourSequence>,
    train_fraction: f64,
    seed: u64,
) -> (Vec<HourSequence>, Vec<HourSequence>) {
    let total = sequences.len();
    let mut groups: alloc::collections::BTreeMap<alloc::string::String, Vec<HourSequence>> =
        alloc::collections::BTreeMap::new();
    for s in sequences {
        groups.entry(s.reg.clone()).or_default().push(s);
    }
    let mut regs: Vec<alloc::string::String> = groups.keys().cloned().collect();
    let mut rng = SplitMix64::new(seed);
    shuffle(&mut regs, &mut rng);

    let target = round_count(total, train_fraction);
    let mut train = Vec::new();
    let mut val = Vec::new();
    for reg in regs {
        let seqs = groups.remove(&reg).unwrap();
        if train.len() < target {
            train.extend(seqs);
        } else {
            val.extend(seqs);
        }
    }
    (train, val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::String;

    fn seq(reg: &str, hour: i64) -> HourSequence {
        HourSequence {
            reg: String::from(reg),
            hour_start: hour,
            values: alloc::vec![0.0; crate::window::SEQUENCE_LEN],
            mask: alloc::vec![false; crate::window::SEQUENCE_LEN],
            samples_present: 0,
        }
    }

    fn make(n: usize) -> Vec<HourSequence> {
        (0..n).map(|i| seq(&format!("N{}", i % 7), i as i64)).collect()
    }

    #[test]
    fn ten_splits_eight_two() {
        let (train, val) = split_dataset(make(10), 0.8, 1, false);
        assert_eq!(train.len(), 8);
        assert_eq!(val.len(), 2);
    }

    #[test]
    fn reproduces_reference_dataset_sizes() {
        let (train, val) = split_dataset(make(9017), 0.8, 42, false);
        assert_eq!(train.len(), 7214);
        assert_eq!(val.len(), 1803);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = split_dataset(make(50), 0.8, 5, false);
        let b = split_dataset(make(50), 0.8, 5, false);
        assert_eq!(a, b);
    }

    #[test]
    fn disjoint_and_covering() {
        let (train, val) = split_dataset(make(33), 0.8, 9, false);
        assert_eq!(train.len() + val.len(), 33);
        let mut hours: Vec<i64> = train.iter().chain(val.iter()).map(|s| s.hour_start).collect();
        hours.sort_unstable();
        assert_eq!(hours, (0..33).collect::<Vec<i64>>());
    }

    #[test]
    fn grouped_split_keeps_aircraft_on_one_side() {
        let (train, val) = split_dataset(make(70), 0.8, 3, true);
        assert_eq!(train.len() + val.len(), 70);
        for t in &train {
            assert!(!val.iter().any(|v| v.reg == t.reg));
        }
        assert!(!val.is_empty());
    }
}
