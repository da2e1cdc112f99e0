#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod event;
pub mod features;
pub mod filter;
pub mod nn;
pub mod rng;
pub mod scaler;
pub mod split;
pub mod template;
pub mod track;
pub mod window;

pub use event::{AircraftEvent, FeatureVector17, RangeError, FEATURE_COUNT, FEATURE_NAMES};
pub use window::{HourSequence, BLOCK_COUNT, SEQUENCE_LEN};
