//! Synthetic snapshot generator.
//!
//! Produces a directory of snapshot JSON files plus a registration
//! whitelist, so the full pipeline runs with no external data. Output is
//! a pure function of the parameters: aircraft follow smooth
//! deterministic paths and per-tick presence comes from seeded streams.

use std::fmt::Write as _;
use std::path::Path;

use adsb_core::rng::{derive_seed, SplitMix64};

use crate::{PipelineError, Result};

/// Snapshot cadence within each simulated hour.
const TICKS_PER_HOUR: usize = 60;
const TICK_MS: i64 = 3_600_000 / TICKS_PER_HOUR as i64;
/// Fixture time starts at an hour boundary.
const EPOCH_START_MS: i64 = 1_600_000_000_000 - (1_600_000_000_000 % 3_600_000);

#[derive(Debug)]
pub struct FixtureSummary {
    pub snapshot_files: usize,
    pub aircraft: usize,
    pub whitelisted: usize,
}

struct SimAircraft {
    reg: String,
    icao: String,
    interesting: bool,
    lat: f64,
    long: f64,
    alt: i64,
    spd: f64,
    trak: f64,
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

/// Generate `hours` hours of snapshots for `aircraft` aircraft into
/// `out_dir/snapshots/`, plus `out_dir/whitelist.txt`.
///
/// Even-indexed aircraft carry the interesting flag; the whitelist holds
/// the first odd-indexed registration, so both filter paths are
/// exercised.
pub fn generate_fixture(
    out_dir: &Path,
    aircraft: usize,
    hours: usize,
    seed: u64,
) -> Result<FixtureSummary> {
    if aircraft == 0 || hours == 0 {
        return Err(PipelineError::Usage(
            "fixture needs at least 1 aircraft and 1 hour".to_string(),
        ));
    }
    let snap_dir = out_dir.join("snapshots");
    std::fs::create_dir_all(&snap_dir).map_err(|e| PipelineError::io(&snap_dir, e))?;

    let mut fleet: Vec<SimAircraft> = (0..aircraft)
        .map(|i| {
            let mut rng = SplitMix64::new(derive_seed(seed, &[0xf1ee7, i as u64]));
            SimAircraft {
                reg: format!("N{:03}SF", 100 + i),
                icao: format!("A{:05X}", 0x1000 + i),
                interesting: i % 2 == 0,
                lat: rng.next_range(33.0, 42.0),
                long: rng.next_range(-120.0, -75.0),
                alt: 2000 + (rng.next_index(80) as i64) * 100,
                spd: rng.next_range(90.0, 180.0),
                trak: rng.next_range(0.0, 360.0),
            }
        })
        .collect();

    let ticks = hours * TICKS_PER_HOUR;
    for tick in 0..ticks {
        let pos_time = EPOCH_START_MS + tick as i64 * TICK_MS;
        let mut out = String::from("{\"acList\":[");
        let mut first = true;
        for (i, a) in fleet.iter_mut().enumerate() {
            let mut rng =
                SplitMix64::new(derive_seed(seed, &[0x71c4, tick as u64, i as u64]));
            // Surveillance-style orbiting: heading drifts, position
            // integrates it.
            a.trak = (a.trak + rng.next_range(2.0, 10.0)).rem_euclid(360.0);
            let rad = a.trak.to_radians();
            let step = a.spd / 3600.0 / 60.0 * (TICK_MS as f64 / 60_000.0);
            a.lat += step * rad.cos();
            a.long += step * rad.sin();
            a.alt += rng.next_index(200) as i64 - 100;
            a.spd = (a.spd + rng.next_range(-3.0, 3.0)).clamp(60.0, 220.0);

            // ~15% of ticks an aircraft drops out of the snapshot.
            if rng.next_f64() < 0.15 {
                continue;
            }
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(
                out,
                "{{\"Reg\":\"{}\",\"Icao\":\"{}\",\"Cou\":\"United States\",\"Interested\":{},\
                 \"Tsec\":{},\"Cmsgs\":{},\"Alt\":{},\"Galt\":{},\"InHG\":29.92,\
                 \"Lat\":{},\"Long\":{},\"PosTime\":{},\"Spd\":{},\"SpdTyp\":0,\
                 \"Trak\":{},\"TrkH\":false,\"Vsi\":{},\"Gnd\":false,\"Trt\":2",
                a.reg,
                a.icao,
                a.interesting,
                (pos_time / 1000) % 86_400,
                500 + tick * 7 + i,
                a.alt,
                a.alt - 150,
                round6(a.lat),
                round6(a.long),
                pos_time,
                round6(a.spd),
                round6(a.trak),
                rng.next_index(400) as i64 - 200,
            );
            // Target altitude/track are only sometimes broadcast.
            if rng.next_f64() < 0.7 {
                let _ = write!(out, ",\"Talt\":{}", a.alt + 500);
            }
            if rng.next_f64() < 0.7 {
                let _ = write!(out, ",\"Ttrk\":{}", round6(a.trak));
            }
            out.push('}');
        }
        out.push_str("]}\n");
        let path = snap_dir.join(format!("snapshot-{tick:05}.json"));
        std::fs::write(&path, out).map_err(|e| PipelineError::io(&path, e))?;
    }

    // Whitelist one non-interesting registration so the whitelist path
    // contributes aircraft beyond the flag path.
    let whitelisted: Vec<&str> = fleet
        .iter()
        .filter(|a| !a.interesting)
        .take(1)
        .map(|a| a.reg.as_str())
        .collect();
    let wl_path = out_dir.join("whitelist.txt");
    let mut wl = whitelisted.join("\n");
    if !wl.is_empty() {
        wl.push('\n');
    }
    std::fs::write(&wl_path, wl).map_err(|e| PipelineError::io(&wl_path, e))?;

    Ok(FixtureSummary {
        snapshot_files: ticks,
        aircraft,
        whitelisted: whitelisted.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::load_snapshot;

    #[test]
    fn generates_parseable_snapshots_and_whitelist() {
        let dir = tempfile::tempdir().unwrap();
        let summary = generate_fixture(dir.path(), 3, 1, 7).unwrap();
        assert_eq!(summary.snapshot_files, TICKS_PER_HOUR);
        let load = load_snapshot(
            &dir.path().join("snapshots/snapshot-00000.json"),
            "Interested",
        )
        .unwrap();
        assert!(load.warnings.is_empty());
        assert!(!load.events.is_empty());
        let e = &load.events[0];
        assert_eq!(e.country, "United States");
        assert!(e.lat.unwrap().abs() <= 90.0);
        let wl = std::fs::read_to_string(dir.path().join("whitelist.txt")).unwrap();
        assert_eq!(wl.lines().count(), 1);
    }

    #[test]
    fn same_seed_same_bytes_different_seed_differs() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let c = tempfile::tempdir().unwrap();
        generate_fixture(a.path(), 2, 1, 5).unwrap();
        generate_fixture(b.path(), 2, 1, 5).unwrap();
        generate_fixture(c.path(), 2, 1, 6).unwrap();
        let read = |d: &Path| std::fs::read(d.join("snapshots/snapshot-00003.json")).unwrap();
        assert_eq!(read(a.path()), read(b.path()));
        assert_ne!(read(a.path()), read(c.path()));
    }

    #[test]
    fn zero_aircraft_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = generate_fixture(dir.path(), 0, 1, 7).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
