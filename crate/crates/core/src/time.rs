//! Simulated time at millisecond resolution.
//!
//! Scenario files express instants and durations as seconds (floating point);
//! internally everything is an integer count of milliseconds.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimDuration(pub u64);

fn secs_to_millis(secs: f64) -> Option<u64> {
    if secs.is_finite() && secs >= 0.0 {
        Some((secs * 1000.0).round() as u64)
    } else {
        None
    }
}

fn fmt_millis(ms: u64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let whole = ms / 1000;
    let frac = ms % 1000;
    if frac == 0 {
        write!(f, "{whole}.0")
    } else {
        let s = format!("{frac:03}");
        write!(f, "{whole}.{}", s.trim_end_matches('0'))
    }
}

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub fn from_millis(ms: u64) -> Self {
        SimTime(ms)
    }

    pub fn from_secs_f64(secs: f64) -> Option<Self> {
        secs_to_millis(secs).map(SimTime)
    }

    pub fn as_millis(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    /// Elapsed time since `earlier`, zero if `earlier` is in the future.
    pub fn since(self, earlier: SimTime) -> SimDuration {
        SimDuration(self.0.saturating_sub(earlier.0))
    }
}

impl SimDuration {
    pub const ZERO: SimDuration = SimDuration(0);

    pub fn from_millis(ms: u64) -> Self {
        SimDuration(ms)
    }

    pub fn from_secs(secs: u64) -> Self {
        SimDuration(secs * 1000)
    }

    pub fn from_secs_f64(secs: f64) -> Option<Self> {
        secs_to_millis(secs).map(SimDuration)
    }

    pub fn as_millis(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl Add<SimDuration> for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimDuration) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub<SimDuration> for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimDuration) -> SimTime {
        SimTime(self.0.saturating_sub(rhs.0))
    }
}

impl Add for SimDuration {
    type Output = SimDuration;
    fn add(self, rhs: SimDuration) -> SimDuration {
        SimDuration(self.0 + rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_millis(self.0, f)
    }
}

impl fmt::Display for SimDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_millis(self.0, f)?;
        f.write_str("s")
    }
}

macro_rules! seconds_serde {
    ($ty:ident) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_f64(self.0 as f64 / 1000.0)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let secs = f64::deserialize(d)?;
                secs_to_millis(secs).map($ty).ok_or_else(|| {
                    serde::de::Error::custom(format!("invalid time in seconds: {secs}"))
                })
            }
        }
    };
}

seconds_serde!(SimTime);
seconds_serde!(SimDuration);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_trims_trailing_zeros() {
        assert_eq!(SimTime(1200).to_string(), "1.2");
        assert_eq!(SimTime(64_000).to_string(), "64.0");
        assert_eq!(SimTime(1001).to_string(), "1.001");
        assert_eq!(SimTime(100).to_string(), "0.1");
    }

    #[test]
    fn seconds_round_to_millis() {
        assert_eq!(SimTime::from_secs_f64(75.3), Some(SimTime(75_300)));
        assert_eq!(SimTime::from_secs_f64(-1.0), None);
        let t: SimTime = serde_json::from_str("0.9").unwrap();
        assert_eq!(t + SimDuration(300), SimTime(1200));
    }
}
