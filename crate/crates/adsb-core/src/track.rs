//! Grouping events into per-aircraft tracks.

use alloc::string::String;
use alloc::vec::Vec;

use crate::event::AircraftEvent;

/// Time-ordered event history for one aircraft registration.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftTrack {
    pub reg: String,
    /// Strictly increasing in `pos_time`.
    pub events: Vec<AircraftEvent>,
}

/// Group events by registration and sort each group by position time.
///
/// Events without a positive `pos_time` are dropped (they cannot be
/// windowed). Exact (reg, pos_time) duplicates keep the first occurrence.
/// Tracks come back sorted by registration.
pub fn build_tracks(events: Vec<AircraftEvent>) -> Vec<AircraftTrack> {
    let mut groups: alloc::collections::BTreeMap<String, Vec<AircraftEvent>> =
        alloc::collections::BTreeMap::new();
    for e in events {
        match e.pos_time {
            Some(t) if t > 0 => groups.entry(e.reg.clone()).or_default().push(e),
            _ => {}
        }
    }
    groups
        .into_iter()
        .map(|(reg, mut evs)| {
            evs.sort_by_key(|e| e.pos_time);
            evs.dedup_by_key(|e| e.pos_time);
            AircraftTrack { reg, events: evs }
        })
        .collect()
}
