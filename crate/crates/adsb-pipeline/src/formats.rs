//! Persisted artifact formats.
//!
//! All artifacts are line-oriented text with a format-version header and
//! an embedded feature-order line, so every file is self-describing.
//! Floats are written with Rust's shortest round-trip formatting, which
//! makes persist/load bit-exact. See docs/data-format.md.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use adsb_core::event::{AircraftEvent, FEATURE_COUNT, FEATURE_NAMES};
use adsb_core::nn::{DenseParams, LstmParams, Matrix, ModelParams, TrainHistory};
use adsb_core::scaler::ScalerStats;
use adsb_core::track::{build_tracks, AircraftTrack};
use adsb_core::window::{HourSequence, BLOCK_COUNT, SEQUENCE_LEN};

use crate::{PipelineError, Result};

const TRK_HEADER: &str = "#adsb-trk v1";
const SEQ_HEADER: &str = "#adsb-seq v1";
const SCALER_HEADER: &str = "#adsb-scaler v1";
const PARAMS_HEADER: &str = "#adsb-params v1";

fn feature_order_line() -> String {
    format!("#features {}", FEATURE_NAMES.join(","))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() && !parent.exists() {
            return Err(PipelineError::io(
                path,
                std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("directory {} does not exist", parent.display()),
                ),
            ));
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| PipelineError::io(path, e))?;
    f.write_all(text.as_bytes())
        .map_err(|e| PipelineError::io(path, e))
}

fn read_lines(path: &Path, expected_header: &str) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    let mut lines: Vec<String> = text.lines().map(|l| l.to_string()).collect();
    if lines.first().map(|l| l.as_str()) != Some(expected_header) {
        return Err(PipelineError::data(format!(
            "{}: missing header `{expected_header}`",
            path.display()
        )));
    }
    lines.remove(0);
    Ok(lines)
}

fn check_feature_order(path: &Path, line: Option<&String>) -> Result<()> {
    if line.map(|l| l.as_str()) != Some(feature_order_line().as_str()) {
        return Err(PipelineError::data(format!(
            "{}: feature-order line missing or different from the canonical order",
            path.display()
        )));
    }
    Ok(())
}

fn opt_i64(v: Option<i64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn opt_bool(v: Option<bool>) -> String {
    match v {
        None => String::new(),
        Some(true) => "1".to_string(),
        Some(false) => "0".to_string(),
    }
}

fn fmt_f64(v: f64) -> String {
    // `{}` on f64 is the shortest representation that parses back to
    // the same bits.
    format!("{v}")
}

fn parse_opt_i64(s: &str, what: &str) -> Result<Option<i64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| PipelineError::data(format!("bad {what}: {s}")))
}

fn parse_opt_f64(s: &str, what: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| PipelineError::data(format!("bad {what}: {s}")))
}

fn parse_opt_bool(s: &str, what: &str) -> Result<Option<bool>> {
    match s {
        "" => Ok(None),
        "1" => Ok(Some(true)),
        "0" => Ok(Some(false)),
        _ => Err(PipelineError::data(format!("bad {what}: {s}"))),
    }
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| PipelineError::data(format!("bad {what}: {s}")))
}

// ---------------------------------------------------------------------
// Curated event dataset (.trk): one event per line, tab separated.

pub fn write_tracks(tracks: &[AircraftTrack], path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{TRK_HEADER}");
    let _ = writeln!(out, "{}", feature_order_line());
    for t in tracks {
        for e in &t.events {
            let cols = [
                e.reg.clone(),
                e.icao.clone(),
                e.country.clone(),
                if e.interesting { "1" } else { "0" }.to_string(),
                opt_i64(e.tsec),
                opt_i64(e.cmsgs),
                opt_i64(e.alt),
                opt_i64(e.galt),
                opt_f64(e.inhg),
                opt_f64(e.lat),
                opt_f64(e.long),
                opt_i64(e.pos_time),
                opt_f64(e.spd),
                opt_i64(e.spd_typ),
                opt_f64(e.trak),
                opt_bool(e.trk_h),
                opt_i64(e.vsi),
                opt_bool(e.gnd),
                opt_i64(e.trt),
                opt_f64(e.talt),
                opt_f64(e.ttrk),
            ];
            let _ = writeln!(out, "{}", cols.join("\t"));
        }
    }
    write_text(path, &out)
}

pub fn read_tracks(path: &Path) -> Result<Vec<AircraftTrack>> {
    let lines = read_lines(path, TRK_HEADER)?;
    check_feature_order(path, lines.first())?;
    let mut events = Vec::new();
    for line in lines.iter().skip(1) {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 + FEATURE_COUNT {
            return Err(PipelineError::data(format!(
                "{}: event line has {} columns, expected {}",
                path.display(),
                cols.len(),
                4 + FEATURE_COUNT
            )));
        }
        let mut e = AircraftEvent::empty();
        e.reg = cols[0].to_string();
        e.icao = cols[1].to_string();
        e.country = cols[2].to_string();
        e.interesting = cols[3] == "1";
        e.tsec = parse_opt_i64(cols[4], "Tsec")?;
        e.cmsgs = parse_opt_i64(cols[5], "Cmsgs")?;
        e.alt = parse_opt_i64(cols[6], "Alt")?;
        e.galt = parse_opt_i64(cols[7], "Galt")?;
        e.inhg = parse_opt_f64(cols[8], "InHG")?;
        e.lat = parse_opt_f64(cols[9], "Lat")?;
        e.long = parse_opt_f64(cols[10], "Long")?;
        e.pos_time = parse_opt_i64(cols[11], "PosTime")?;
        e.spd = parse_opt_f64(cols[12], "Spd")?;
        e.spd_typ = parse_opt_i64(cols[13], "SpdTyp")?;
        e.trak = parse_opt_f64(cols[14], "Trak")?;
        e.trk_h = parse_opt_bool(cols[15], "TrkH")?;
        e.vsi = parse_opt_i64(cols[16], "Vsi")?;
        e.gnd = parse_opt_bool(cols[17], "Gnd")?;
        e.trt = parse_opt_i64(cols[18], "Trt")?;
        e.talt = parse_opt_f64(cols[19], "Talt")?;
        e.ttrk = parse_opt_f64(cols[20], "Ttrk")?;
        events.push(e);
    }
    // Persisted tracks are already grouped, sorted, and deduplicated, so
    // rebuilding is the identity on well-formed files.
    Ok(build_tracks(events))
}

// ---------------------------------------------------------------------
// Sequence dataset (.seq).

pub fn write_sequences(sequences: &[HourSequence], scaled: bool, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{SEQ_HEADER}");
    let _ = writeln!(out, "{}", feature_order_line());
    let _ = writeln!(out, "#scaled {}", if scaled { 1 } else { 0 });
    for s in sequences {
        let mask: String = s
            .block_present()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        let values: Vec<String> = s.values.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            s.reg,
            s.hour_start,
            s.samples_present,
            mask,
            values.join(" ")
        );
    }
    write_text(path, &out)
}

pub fn read_sequences(path: &Path) -> Result<(Vec<HourSequence>, bool)> {
    let lines = read_lines(path, SEQ_HEADER)?;
    check_feature_order(path, lines.first())?;
    let scaled = match lines.get(1).map(|l| l.as_str()) {
        Some("#scaled 1") => true,
        Some("#scaled 0") => false,
        _ => {
            return Err(PipelineError::data(format!(
                "{}: missing #scaled line",
                path.display()
            )))
        }
    };
    let mut sequences = Vec::new();
    for line in lines.iter().skip(2) {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(PipelineError::data(format!(
                "{}: sequence line has {} columns, expected 5",
                path.display(),
                cols.len()
            )));
        }
        let hour_start: i64 = cols[1]
            .parse()
            .map_err(|_| PipelineError::data(format!("bad hour_start: {}", cols[1])))?;
        let samples_present: usize = cols[2]
            .parse()
            .map_err(|_| PipelineError::data(format!("bad samples_present: {}", cols[2])))?;
        if cols[3].len() != BLOCK_COUNT {
            return Err(PipelineError::data(format!(
                "{}: mask must be {BLOCK_COUNT} characters",
                path.display()
            )));
        }
        let mut mask = vec![false; SEQUENCE_LEN];
        for (b, ch) in cols[3].chars().enumerate() {
            let on = match ch {
                '1' => true,
                '0' => false,
                _ => {
                    return Err(PipelineError::data(format!(
                        "{}: bad mask character {ch}",
                        path.display()
                    )))
                }
            };
            mask[b * FEATURE_COUNT..(b + 1) * FEATURE_COUNT].fill(on);
        }
        let values: Vec<f64> = cols[4]
            .split(' ')
            .map(|v| parse_f64(v, "sequence value"))
            .collect::<Result<_>>()?;
        if values.len() != SEQUENCE_LEN {
            return Err(PipelineError::data(format!(
                "{}: sequence has {} values, expected {SEQUENCE_LEN}",
                path.display(),
                values.len()
            )));
        }
        sequences.push(HourSequence {
            reg: cols[0].to_string(),
            hour_start,
            values,
            mask,
            samples_present,
        });
    }
    Ok((sequences, scaled))
}

// ---------------------------------------------------------------------
// Scaler statistics (.stats): one row per feature.

pub fn write_scaler(stats: &ScalerStats, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{SCALER_HEADER}");
    let _ = writeln!(out, "{}", feature_order_line());
    let _ = writeln!(out, "#fitted_on {}", stats.fitted_on);
    let _ = writeln!(out, "#columns feature,mean,std,post_min,post_max");
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            name,
            fmt_f64(stats.mean[i]),
            fmt_f64(stats.std[i]),
            fmt_f64(stats.post_min[i]),
            fmt_f64(stats.post_max[i])
        );
    }
    write_text(path, &out)
}

pub fn read_scaler(path: &Path) -> Result<ScalerStats> {
    let lines = read_lines(path, SCALER_HEADER)?;
    check_feature_order(path, lines.first())?;
    let fitted_on: usize = lines
        .get(1)
        .and_then(|l| l.strip_prefix("#fitted_on "))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| PipelineError::data(format!("{}: missing #fitted_on", path.display())))?;
    let rows: Vec<&String> = lines.iter().skip(3).filter(|l| !l.is_empty()).collect();
    if rows.len() != FEATURE_COUNT {
        return Err(PipelineError::data(format!(
            "{}: expected {FEATURE_COUNT} scaler rows, found {}",
            path.display(),
            rows.len()
        )));
    }
    let mut stats = ScalerStats {
        mean: [0.0; FEATURE_COUNT],
        std: [1.0; FEATURE_COUNT],
        post_min: [0.0; FEATURE_COUNT],
        post_max: [0.0; FEATURE_COUNT],
        fitted_on,
    };
    for (i, row) in rows.iter().enumerate() {
        let cols: Vec<&str> = row.split(',').collect();
        if cols.len() != 5 || cols[0] != FEATURE_NAMES[i] {
            return Err(PipelineError::data(format!(
                "{}: bad scaler row for {}",
                path.display(),
                FEATURE_NAMES[i]
            )));
        }
        stats.mean[i] = parse_f64(cols[1], "mean")?;
        stats.std[i] = parse_f64(cols[2], "std")?;
        stats.post_min[i] = parse_f64(cols[3], "post_min")?;
        stats.post_max[i] = parse_f64(cols[4], "post_max")?;
    }
    Ok(stats)
}

// ---------------------------------------------------------------------
// Model parameters (.params): named sections of row-major matrices.

fn write_matrix(out: &mut String, name: &str, m: &Matrix) {
    let _ = writeln!(out, "{name} {} {}", m.rows, m.cols);
    for r in 0..m.rows {
        let row: Vec<String> = (0..m.cols).map(|c| fmt_f64(m.get(r, c))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

fn write_vector(out: &mut String, name: &str, v: &[f64]) {
    let _ = writeln!(out, "{name} 1 {}", v.len());
    let row: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
    let _ = writeln!(out, "{}", row.join(" "));
}

pub fn write_params(params: &ModelParams, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{PARAMS_HEADER}");
    match params {
        ModelParams::Dense(p) => {
            let _ = writeln!(out, "#variant dense");
            write_matrix(&mut out, "w_enc", &p.w_enc);
            write_vector(&mut out, "b_enc", &p.b_enc);
            write_matrix(&mut out, "w_dec", &p.w_dec);
            write_vector(&mut out, "b_dec", &p.b_dec);
        }
        ModelParams::Lstm(p) => {
            let _ = writeln!(out, "#variant lstm");
            let _ = writeln!(out, "#hidden_dim {}", p.hidden_dim);
            for (prefix, cell) in [("enc", &p.encoder), ("dec", &p.decoder)] {
                write_matrix(&mut out, &format!("{prefix}_w_i"), &cell.w_i);
                write_vector(&mut out, &format!("{prefix}_b_i"), &cell.b_i);
                write_matrix(&mut out, &format!("{prefix}_w_f"), &cell.w_f);
                write_vector(&mut out, &format!("{prefix}_b_f"), &cell.b_f);
                write_matrix(&mut out, &format!("{prefix}_w_g"), &cell.w_g);
                write_vector(&mut out, &format!("{prefix}_b_g"), &cell.b_g);
                write_matrix(&mut out, &format!("{prefix}_w_o"), &cell.w_o);
                write_vector(&mut out, &format!("{prefix}_b_o"), &cell.b_o);
            }
            write_matrix(&mut out, "w_proj", &p.w_proj);
            write_vector(&mut out, "b_proj", &p.b_proj);
        }
    }
    write_text(path, &out)
}

struct SectionReader<'a> {
    path: &'a Path,
    lines: std::slice::Iter<'a, String>,
}

impl<'a> SectionReader<'a> {
    fn section(&mut self, name: &str) -> Result<Matrix> {
        let header = self.lines.next().ok_or_else(|| {
            PipelineError::data(format!("{}: truncated before section {name}", self.path.display()))
        })?;
        let parts: Vec<&str> = header.split(' ').collect();
        if parts.len() != 3 || parts[0] != name {
            return Err(PipelineError::data(format!(
                "{}: expected section {name}, found `{header}`",
                self.path.display()
            )));
        }
        let rows: usize = parts[1]
            .parse()
            .map_err(|_| PipelineError::data(format!("bad row count in {name}")))?;
        let cols: usize = parts[2]
            .parse()
            .map_err(|_| PipelineError::data(format!("bad column count in {name}")))?;
        let mut m = Matrix::zeros(rows, cols);
        for r in 0..rows {
            let line = self.lines.next().ok_or_else(|| {
                PipelineError::data(format!("{}: truncated inside {name}", self.path.display()))
            })?;
            let vals: Vec<f64> = line
                .split(' ')
                .map(|v| parse_f64(v, name))
                .collect::<Result<_>>()?;
            if vals.len() != cols {
                return Err(PipelineError::data(format!(
                    "{}: {name} row {r} has {} values, expected {cols}",
                    self.path.display(),
                    vals.len()
                )));
            }
            m.data[r * cols..(r + 1) * cols].copy_from_slice(&vals);
        }
        Ok(m)
    }

    fn vector(&mut self, name: &str, len: usize) -> Result<Vec<f64>> {
        let m = self.section(name)?;
        if m.rows != 1 || m.cols != len {
            return Err(PipelineError::data(format!(
                "{}: {name} has dimensions {}x{}, expected 1x{len}",
                self.path.display(),
                m.rows,
                m.cols
            )));
        }
        Ok(m.data)
    }

    fn matrix(&mut self, name: &str, rows: usize, cols: usize) -> Result<Matrix> {
        let m = self.section(name)?;
        if m.rows != rows || m.cols != cols {
            return Err(PipelineError::data(format!(
                "{}: {name} has dimensions {}x{}, expected {rows}x{cols}",
                self.path.display(),
                m.rows,
                m.cols
            )));
        }
        Ok(m)
    }
}

pub fn read_params(path: &Path) -> Result<ModelParams> {
    let lines = read_lines(path, PARAMS_HEADER)?;
    let variant = lines
        .first()
        .and_then(|l| l.strip_prefix("#variant "))
        .ok_or_else(|| PipelineError::data(format!("{}: missing #variant", path.display())))?
        .to_string();
    match variant.as_str() {
        "dense" => {
            let mut rd = SectionReader {
                path,
                lines: lines[1..].iter(),
            };
            let w_enc = rd.matrix("w_enc", FEATURE_COUNT, SEQUENCE_LEN)?;
            let b_enc = rd.vector("b_enc", FEATURE_COUNT)?;
            let w_dec = rd.matrix("w_dec", SEQUENCE_LEN, FEATURE_COUNT)?;
            let b_dec = rd.vector("b_dec", SEQUENCE_LEN)?;
            Ok(ModelParams::Dense(DenseParams {
                w_enc,
                b_enc,
                w_dec,
                b_dec,
            }))
        }
        "lstm" => {
            let hidden: usize = lines
                .get(1)
                .and_then(|l| l.strip_prefix("#hidden_dim "))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| {
                    PipelineError::data(format!("{}: missing #hidden_dim", path.display()))
                })?;
            let mut rd = SectionReader {
                path,
                lines: lines[2..].iter(),
            };
            let mut p = LstmParams::init(hidden, 0);
            let gate_cols = FEATURE_COUNT + hidden;
            for prefix in ["enc", "dec"] {
                let cell = if prefix == "enc" {
                    &mut p.encoder
                } else {
                    &mut p.decoder
                };
                cell.w_i = rd.matrix(&format!("{prefix}_w_i"), hidden, gate_cols)?;
                cell.b_i = rd.vector(&format!("{prefix}_b_i"), hidden)?;
                cell.w_f = rd.matrix(&format!("{prefix}_w_f"), hidden, gate_cols)?;
                cell.b_f = rd.vector(&format!("{prefix}_b_f"), hidden)?;
                cell.w_g = rd.matrix(&format!("{prefix}_w_g"), hidden, gate_cols)?;
                cell.b_g = rd.vector(&format!("{prefix}_b_g"), hidden)?;
                cell.w_o = rd.matrix(&format!("{prefix}_w_o"), hidden, gate_cols)?;
                cell.b_o = rd.vector(&format!("{prefix}_b_o"), hidden)?;
            }
            p.w_proj = rd.matrix("w_proj", FEATURE_COUNT, hidden)?;
            p.b_proj = rd.vector("b_proj", FEATURE_COUNT)?;
            Ok(ModelParams::Lstm(p))
        }
        other => Err(PipelineError::data(format!(
            "{}: unknown variant `{other}`",
            path.display()
        ))),
    }
}

// ---------------------------------------------------------------------
// Training history (.csv).

pub fn write_history(history: &TrainHistory, path: &Path) -> Result<()> {
    let mut out = String::from("epoch,train_mse,val_mse\n");
    for (i, (t, v)) in history
        .train_mse
        .iter()
        .zip(history.val_mse.iter())
        .enumerate()
    {
        let _ = writeln!(out, "{},{},{}", i + 1, fmt_f64(*t), fmt_f64(*v));
    }
    write_text(path, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use adsb_core::nn::{TrainConfig, Variant};

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    fn sample_event(reg: &str, t: i64) -> AircraftEvent {
        let mut e = AircraftEvent::empty();
        e.reg = reg.to_string();
        e.icao = "ABC123".into();
        e.country = "United States".into();
        e.interesting = true;
        e.pos_time = Some(t);
        e.lat = Some(40.123456789);
        e.long = Some(-73.5);
        e.alt = Some(3500);
        e.trk_h = Some(true);
        e.gnd = Some(false);
        // talt deliberately missing
        e
    }

    #[test]
    fn tracks_round_trip_bit_exact() {
        let dir = tmp();
        let path = dir.path().join("d.trk");
        let tracks = build_tracks(vec![
            sample_event("N1", 1000),
            sample_event("N1", 2000),
            sample_event("N2", 1500),
        ]);
        write_tracks(&tracks, &path).unwrap();
        let loaded = read_tracks(&path).unwrap();
        assert_eq!(loaded, tracks);
        // Missing marker survives.
        assert_eq!(loaded[0].events[0].talt, None);
    }

    #[test]
    fn empty_tracks_round_trip() {
        let dir = tmp();
        let path = dir.path().join("d.trk");
        write_tracks(&[], &path).unwrap();
        assert!(read_tracks(&path).unwrap().is_empty());
    }

    #[test]
    fn sequences_round_trip() {
        let dir = tmp();
        let path = dir.path().join("d.seq");
        let mut values = vec![0.0; SEQUENCE_LEN];
        let mut mask = vec![false; SEQUENCE_LEN];
        for i in 0..FEATURE_COUNT {
            values[i] = 0.1 + i as f64 / 1e17; // awkward floats
            mask[i] = true;
        }
        let seqs = vec![HourSequence {
            reg: "N1".into(),
            hour_start: 3_600_000,
            values,
            mask,
            samples_present: 1,
        }];
        write_sequences(&seqs, true, &path).unwrap();
        let (loaded, scaled) = read_sequences(&path).unwrap();
        assert!(scaled);
        assert_eq!(loaded, seqs);
    }

    #[test]
    fn scaler_round_trip() {
        let dir = tmp();
        let path = dir.path().join("s.stats");
        let mut stats = ScalerStats {
            mean: [0.0; FEATURE_COUNT],
            std: [1.0; FEATURE_COUNT],
            post_min: [-1.0; FEATURE_COUNT],
            post_max: [1.0; FEATURE_COUNT],
            fitted_on: 123,
        };
        stats.mean[5] = 40.7654321;
        stats.std[5] = 0.123456789012345;
        write_scaler(&stats, &path).unwrap();
        assert_eq!(read_scaler(&path).unwrap(), stats);
    }

    #[test]
    fn params_round_trip_both_variants() {
        let dir = tmp();
        for variant in [Variant::Dense, Variant::Lstm] {
            let path = dir.path().join("m.params");
            let params = ModelParams::init(&TrainConfig {
                variant,
                hidden_dim: 5,
                seed: 99,
                ..TrainConfig::default()
            });
            write_params(&params, &path).unwrap();
            assert_eq!(read_params(&path).unwrap(), params);
        }
    }

    #[test]
    fn truncated_params_file_is_a_format_error() {
        let dir = tmp();
        let path = dir.path().join("m.params");
        let params = ModelParams::init(&TrainConfig::default());
        write_params(&params, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let cut: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        std::fs::write(&path, cut).unwrap();
        let err = read_params(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = read_tracks(Path::new("/nonexistent/x.trk")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
