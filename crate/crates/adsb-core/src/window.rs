//! Hourly windowing, 5-minute random sampling, and sequence assembly.

use alloc::string::String;
use alloc::vec::Vec;

use crate::event::{event_to_vector, AircraftEvent, MissingPolicy, FEATURE_COUNT};
use crate::rng::{derive_seed, hash_bytes, SplitMix64};

/// Samples drawn per hour (one per 5-minute bucket).
pub const BLOCK_COUNT: usize = 12;
/// Flattened sequence length: 12 blocks of 17 features.
pub const SEQUENCE_LEN: usize = BLOCK_COUNT * FEATURE_COUNT;

const HOUR_MS: i64 = 3_600_000;
const BUCKET_MS: i64 = HOUR_MS / BLOCK_COUNT as i64;

/// One training example: an hour of flight flattened to 204 values.
///
/// The mask is block-structured: each 17-value block is either all real
/// data or all zero padding.
#[derive(Debug, Clone, PartialEq)]
pub struct HourSequence {
    pub reg: String,
    /// Epoch ms, aligned to the containing UTC hour.
    pub hour_start: i64,
    pub values: Vec<f64>,
    /// True where `values` holds real data.
    pub mask: Vec<bool>,
    /// Number of non-empty 5-minute buckets, in [0, 12].
    pub samples_present: usize,
}

impl HourSequence {
    /// Per-block presence flags derived from the mask.
    pub fn block_present(&self) -> [bool; BLOCK_COUNT] {
        let mut blocks = [false; BLOCK_COUNT];
        for (b, flag) in blocks.iter_mut().enumerate() {
            *flag = self.mask[b * FEATURE_COUNT];
        }
        blocks
    }
}

/// Partition a time-sorted track into UTC-hour windows; empty hours are
/// simply absent from the output.
pub fn window_hours(events: &[AircraftEvent]) -> Vec<(i64, Vec<AircraftEvent>)> {
    let mut windows: Vec<(i64, Vec<AircraftEvent>)> = Vec::new();
    for e in events {
        let t = match e.pos_time {
            Some(t) if t > 0 => t,
            _ => continue,
        };
        let hour_start = t - t.rem_euclid(HOUR_MS);
        match windows.last_mut() {
            Some((h, evs)) if *h == hour_start => evs.push(e.clone()),
            _ => windows.push((hour_start, alloc::vec![e.clone()])),
        }
    }
    windows
}

/// Draw one event uniformly from each 5-minute bucket of the hour.
///
/// Selection is deterministic: each bucket uses its own stream seeded by
/// (seed, reg, hour_start, bucket index), so a single aircraft-hour
/// resamples identically regardless of what else was processed.
pub fn sample_window(
    events: &[AircraftEvent],
    reg: &str,
    hour_start: i64,
    rng_seed: u64,
) -> [Option<AircraftEvent>; BLOCK_COUNT] {
    let mut buckets: [Vec<&AircraftEvent>; BLOCK_COUNT] = Default::default();
    for e in events {
        let t = e.pos_time.expect("windowed events carry pos_time");
        debug_assert!(t >= hour_start && t < hour_start + HOUR_MS);
        let b = ((t - hour_start) / BUCKET_MS) as usize;
        buckets[b.min(BLOCK_COUNT - 1)].push(e);
    }
    let reg_hash = hash_bytes(reg.as_bytes());
    core::array::from_fn(|b| {
        let candidates = &buckets[b];
        if candidates.is_empty() {
            return None;
        }
        let seed = derive_seed(rng_seed, &[reg_hash, hour_start as u64, b as u64]);
        let mut rng = SplitMix64::new(seed);
        Some(candidates[rng.next_index(candidates.len())].clone())
    })
}

/// Concatenate 12 sampled events into a zero-padded 204-value sequence.
pub fn assemble_sequence(
    samples: &[Option<AircraftEvent>; BLOCK_COUNT],
    reg: &str,
    hour_start: i64,
) -> HourSequence {
    let mut values = alloc::vec![0.0; SEQUENCE_LEN];
    let mut mask = alloc::vec![false; SEQUENCE_LEN];
    let mut present = 0;
    for (b, sample) in samples.iter().enumerate() {
        if let Some(e) = sample {
            let v = event_to_vector(e, MissingPolicy::Zero);
            let start = b * FEATURE_COUNT;
            values[start..start + FEATURE_COUNT].copy_from_slice(v.values());
            mask[start..start + FEATURE_COUNT].fill(true);
            present += 1;
        }
    }
    HourSequence {
        reg: String::from(reg),
        hour_start,
        values,
        mask,
        samples_present: present,
    }
}

/// Mostly-padded sequences are unusable; keep those with at least
/// `min_present` real buckets (default 6).
pub fn usability_filter(seq: &HourSequence, min_present: usize) -> bool {
    seq.samples_present >= min_present
}
