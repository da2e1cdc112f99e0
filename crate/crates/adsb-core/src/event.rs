//! Aircraft broadcast events and the canonical 17-feature vector encoding.

use alloc::string::String;
use core::fmt;

use libm::fmod;

/// Number of broadcast fields carried in one feature vector.
pub const FEATURE_COUNT: usize = 17;

/// Canonical feature names, in the frozen vector order. Every downstream
/// index (scaler rows, importance scores) refers to this ordering.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "Tsec", "Cmsgs", "Alt", "Galt", "InHG", "Lat", "Long", "PosTime", "Spd", "SpdTyp", "Trak",
    "TrkH", "Vsi", "Gnd", "Trt", "Talt", "Ttrk",
];

/// Index of a feature name in the canonical ordering.
pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

/// One broadcast observation from a single aircraft.
///
/// Every broadcast field is optional: absent fields are recorded as
/// missing, not zero, so that zero padding is applied (and counted)
/// downstream rather than silently at parse time.
#[derive(Debug, Clone, PartialEq)]
pub struct AircraftEvent {
    /// Seconds the aircraft has been tracked for.
    pub tsec: Option<i64>,
    /// Count of messages received for the aircraft.
    pub cmsgs: Option<i64>,
    /// Altitude in feet at standard pressure.
    pub alt: Option<i64>,
    /// Altitude adjusted for local air pressure.
    pub galt: Option<i64>,
    /// Air pressure in inches of mercury.
    pub inhg: Option<f64>,
    /// Latitude in degrees, [-90, 90].
    pub lat: Option<f64>,
    /// Longitude in degrees, [-180, 180].
    pub long: Option<f64>,
    /// Epoch milliseconds of the last reported position.
    pub pos_time: Option<i64>,
    /// Ground speed in knots.
    pub spd: Option<f64>,
    /// Speed type discriminant (raw integer, no legend).
    pub spd_typ: Option<i64>,
    /// Track angle over the ground, degrees clockwise from north.
    pub trak: Option<f64>,
    /// True if `trak` is the aircraft's heading.
    pub trk_h: Option<bool>,
    /// Vertical speed in feet per minute.
    pub vsi: Option<i64>,
    /// True if the aircraft is on the ground.
    pub gnd: Option<bool>,
    /// Transponder type discriminant (raw integer).
    pub trt: Option<i64>,
    /// Autopilot target altitude in feet.
    pub talt: Option<f64>,
    /// Autopilot target track in degrees.
    pub ttrk: Option<f64>,

    // Identity metadata, not part of the feature vector.
    pub reg: String,
    pub icao: String,
    pub country: String,
    pub interesting: bool,
}

impl AircraftEvent {
    /// An event with every field missing and empty metadata.
    pub fn empty() -> Self {
        AircraftEvent {
            tsec: None,
            cmsgs: None,
            alt: None,
            galt: None,
            inhg: None,
            lat: None,
            long: None,
            pos_time: None,
            spd: None,
            spd_typ: None,
            trak: None,
            trk_h: None,
            vsi: None,
            gnd: None,
            trt: None,
            talt: None,
            ttrk: None,
            reg: String::new(),
            icao: String::new(),
            country: String::new(),
            interesting: false,
        }
    }
}

/// Fixed-length feature vector for one event, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector17(pub [f64; FEATURE_COUNT]);

impl FeatureVector17 {
    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.0
    }
}

/// Policy for encoding fields that are missing from an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingPolicy {
    /// Missing fields encode as 0.0.
    Zero,
}

/// Latitude or longitude outside its physical range.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeError {
    pub field: &'static str,
    pub value: f64,
}

impl fmt::Display for RangeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} out of range: {}", self.field, self.value)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RangeError {}

/// Encode an event into the canonical 17-value vector.
///
/// Booleans map to exactly 0.0 or 1.0; missing fields follow `policy`.
pub fn event_to_vector(e: &AircraftEvent, policy: MissingPolicy) -> FeatureVector17 {
    let MissingPolicy::Zero = policy;
    let int = |v: Option<i64>| v.map(|x| x as f64).unwrap_or(0.0);
    let real = |v: Option<f64>| v.unwrap_or(0.0);
    let boolean = |v: Option<bool>| if v == Some(true) { 1.0 } else { 0.0 };
    FeatureVector17([
        int(e.tsec),
        int(e.cmsgs),
        int(e.alt),
        int(e.galt),
        real(e.inhg),
        real(e.lat),
        real(e.long),
        int(e.pos_time),
        real(e.spd),
        int(e.spd_typ),
        real(e.trak),
        boolean(e.trk_h),
        int(e.vsi),
        boolean(e.gnd),
        int(e.trt),
        real(e.talt),
        real(e.ttrk),
    ])
}

/// Reduce track angles into [0, 360) and validate lat/long bounds.
pub fn normalize_angles(mut e: AircraftEvent) -> Result<AircraftEvent, RangeError> {
    if let Some(lat) = e.lat {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(RangeError { field: "Lat", value: lat });
        }
    }
    if let Some(long) = e.long {
        if !(-180.0..=180.0).contains(&long) {
            return Err(RangeError { field: "Long", value: long });
        }
    }
    e.trak = e.trak.map(wrap_degrees);
    e.ttrk = e.ttrk.map(wrap_degrees);
    Ok(e)
}

fn wrap_degrees(deg: f64) -> f64 {
    let r = fmod(deg, 360.0);
    if r < 0.0 {
        r + 360.0
    } else {
        r
    }
}
