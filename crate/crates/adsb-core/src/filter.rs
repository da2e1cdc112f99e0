//! Aircraft selection filters.

use alloc::collections::BTreeSet;
use alloc::string::String;

use crate::event::AircraftEvent;

/// Which aircraft make it into the curated dataset.
///
/// An aircraft passes when its country matches and it is either on the
/// registration whitelist or flagged interesting (when that path is
/// enabled).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterConfig {
    pub registration_whitelist: BTreeSet<String>,
    pub require_interesting: bool,
    pub country: String,
}

impl FilterConfig {
    pub fn new(
        registration_whitelist: BTreeSet<String>,
        require_interesting: bool,
        country: String,
    ) -> Result<Self, InvalidFilter> {
        if registration_whitelist.is_empty() && !require_interesting {
            return Err(InvalidFilter);
        }
        Ok(FilterConfig {
            registration_whitelist,
            require_interesting,
            country,
        })
    }
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            registration_whitelist: BTreeSet::new(),
            require_interesting: true,
            country: String::from("United States"),
        }
    }
}

/// A filter that can never accept anything: empty whitelist and the
/// interesting-flag path disabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InvalidFilter;

impl core::fmt::Display for InvalidFilter {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "filter needs a non-empty whitelist or require_interesting"
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InvalidFilter {}

pub fn passes_filter(e: &AircraftEvent, f: &FilterConfig) -> bool {
    if e.country != f.country {
        return false;
    }
    f.registration_whitelist.contains(&e.reg) || (f.require_interesting && e.interesting)
}
