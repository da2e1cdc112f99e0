//! Parsing of locally stored aircraft-snapshot files.
//!
//! A snapshot file is a JSON object with an `acList` array (an
//! `aircraft` alias is accepted). Each entry carries the broadcast
//! fields by name — Tsec, Cmsgs, Alt, Galt, InHG, Lat, Long, PosTime,
//! Spd, SpdTyp, Trak, TrkH, Vsi, Gnd, Trt, Talt, Ttrk — plus the
//! identity fields Reg, Icao, Cou and the interesting flag (field name
//! configurable, default "Interested"). Unknown extra fields are
//! ignored. See docs/data-format.md.

use std::fmt;
use std::path::Path;

use adsb_core::event::AircraftEvent;
use serde_json::Value;

pub const DEFAULT_INTERESTING_FIELD: &str = "Interested";

/// A record that could not be mapped to an [`AircraftEvent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Offending field, when known.
    pub field: Option<String>,
    pub message: String,
}

impl ParseError {
    fn malformed(message: impl Into<String>) -> Self {
        ParseError {
            field: None,
            message: message.into(),
        }
    }

    fn mismatch(field: &str, value: &Value) -> Self {
        ParseError {
            field: Some(field.to_string()),
            message: format!("field {field} has incompatible value {value}"),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for ParseError {}

fn real_field(obj: &Value, name: &str) -> Result<Option<f64>, ParseError> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| ParseError::mismatch(name, v)),
    }
}

fn int_field(obj: &Value, name: &str) -> Result<Option<i64>, ParseError> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => match v.as_i64() {
            Some(i) => Ok(Some(i)),
            // Integer-valued floats are accepted; 3500.0 means 3500.
            None => match v.as_f64() {
                Some(f) if f.fract() == 0.0 => Ok(Some(f as i64)),
                _ => Err(ParseError::mismatch(name, v)),
            },
        },
    }
}

fn bool_field(obj: &Value, name: &str) -> Result<Option<bool>, ParseError> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Bool(b)) => Ok(Some(*b)),
        Some(v) => Err(ParseError::mismatch(name, v)),
    }
}

fn string_field(obj: &Value, name: &str) -> Result<String, ParseError> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(String::new()),
        Some(Value::String(s)) => Ok(s.clone()),
        Some(v) => Err(ParseError::mismatch(name, v)),
    }
}

/// Map one aircraft JSON object to an event.
pub fn parse_record(obj: &Value, interesting_field: &str) -> Result<AircraftEvent, ParseError> {
    if !obj.is_object() {
        return Err(ParseError::malformed("aircraft record is not an object"));
    }
    let mut e = AircraftEvent::empty();
    e.tsec = int_field(obj, "Tsec")?;
    e.cmsgs = int_field(obj, "Cmsgs")?;
    e.alt = int_field(obj, "Alt")?;
    e.galt = int_field(obj, "Galt")?;
    e.inhg = real_field(obj, "InHG")?;
    e.lat = real_field(obj, "Lat")?;
    e.long = real_field(obj, "Long")?;
    e.pos_time = int_field(obj, "PosTime")?;
    e.spd = real_field(obj, "Spd")?;
    e.spd_typ = int_field(obj, "SpdTyp")?;
    e.trak = real_field(obj, "Trak")?;
    e.trk_h = bool_field(obj, "TrkH")?;
    e.vsi = int_field(obj, "Vsi")?;
    e.gnd = bool_field(obj, "Gnd")?;
    e.trt = int_field(obj, "Trt")?;
    e.talt = real_field(obj, "Talt")?;
    e.ttrk = real_field(obj, "Ttrk")?;
    e.reg = string_field(obj, "Reg")?;
    e.icao = string_field(obj, "Icao")?;
    e.country = string_field(obj, "Cou")?;
    e.interesting = bool_field(obj, interesting_field)?.unwrap_or(false);
    Ok(e)
}

/// Parse one aircraft record given as raw JSON text.
pub fn parse_event(raw: &str, interesting_field: &str) -> Result<AircraftEvent, ParseError> {
    let value: Value = serde_json::from_str(raw)
        .map_err(|e| ParseError::malformed(format!("malformed record: {e}")))?;
    parse_record(&value, interesting_field)
}

/// All parseable events from one snapshot file plus per-record warnings.
pub struct SnapshotLoad {
    pub events: Vec<AircraftEvent>,
    pub warnings: Vec<String>,
}

/// Load a snapshot file. Per-record failures become warnings; only an
/// unreadable or structurally malformed file is fatal.
pub fn load_snapshot(
    path: &Path,
    interesting_field: &str,
) -> Result<SnapshotLoad, crate::PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| crate::PipelineError::io(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        crate::PipelineError::data(format!("{}: malformed snapshot: {e}", path.display()))
    })?;
    let list = value
        .get("acList")
        .or_else(|| value.get("aircraft"))
        .and_then(|v| v.as_array())
        .ok_or_else(|| {
            crate::PipelineError::data(format!(
                "{}: snapshot has no acList array",
                path.display()
            ))
        })?;
    let mut events = Vec::with_capacity(list.len());
    let mut warnings = Vec::new();
    for (i, rec) in list.iter().enumerate() {
        match parse_record(rec, interesting_field) {
            Ok(e) => events.push(e),
            Err(err) => warnings.push(format!("{}: record {i}: {err}", path.display())),
        }
    }
    Ok(SnapshotLoad { events, warnings })
}
