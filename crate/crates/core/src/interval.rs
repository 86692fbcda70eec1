//! Natural-number time intervals.
//!
//! A [`TimeInterval`] has a natural left endpoint and a right endpoint that is
//! either natural or `+inf`. Each endpoint carries its own closedness flag so
//! that `[n,m]`, `[n,m[`, `]n,m]`, `]n,m[` and `[n,inf[` can all be written
//! down. Since time only advances in integer steps, every interval also has an
//! equivalent closed integer form returned by [`TimeInterval::integer_bounds`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper endpoint of an interval: a natural number or `+inf`.
///
/// The derived ordering places every finite value below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Bound {
    Finite(u32),
    Infinite,
}

impl Bound {
    pub fn is_infinite(self) -> bool {
        matches!(self, Bound::Infinite)
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    /// `self - d`, saturating `inf - d = inf`. Returns `None` on underflow.
    pub fn checked_sub(self, d: u32) -> Option<Bound> {
        match self {
            Bound::Finite(v) => v.checked_sub(d).map(Bound::Finite),
            Bound::Infinite => Some(Bound::Infinite),
        }
    }
}

impl From<u32> for Bound {
    fn from(v: u32) -> Self {
        Bound::Finite(v)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

/// An ℕ-interval of the non-negative reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeInterval {
    low: u32,
    high: Bound,
    low_open: bool,
    high_open: bool,
}

impl TimeInterval {
    /// Builds an interval, checking `low <= high` and that an infinite right
    /// endpoint is open.
    pub fn new(low: u32, high: Bound, low_open: bool, high_open: bool) -> Result<Self> {
        let high_open = high_open || high.is_infinite();
        if let Bound::Finite(h) = high {
            if low > h {
                return Err(Error::IllFormedInterval(format!(
                    "left endpoint {low} exceeds right endpoint {h}"
                )));
            }
        }
        Ok(TimeInterval {
            low,
            high,
            low_open,
            high_open,
        })
    }

    /// `[low, high]`.
    pub fn closed(low: u32, high: u32) -> Result<Self> {
        Self::new(low, Bound::Finite(high), false, false)
    }

    /// `[low, inf[`.
    pub fn from_lower(low: u32) -> Self {
        TimeInterval {
            low,
            high: Bound::Infinite,
            low_open: false,
            high_open: true,
        }
    }

    /// `[0, inf[`.
    pub fn unbounded() -> Self {
        Self::from_lower(0)
    }

    pub fn low(&self) -> u32 {
        self.low
    }

    pub fn high(&self) -> Bound {
        self.high
    }

    pub fn low_open(&self) -> bool {
        self.low_open
    }

    pub fn high_open(&self) -> bool {
        self.high_open
    }

    /// Smallest and largest integer in the interval, or `None` if it holds no
    /// integer (e.g. `]2,3[`).
    pub fn integer_bounds(&self) -> Option<(u32, Bound)> {
        let lo = if self.low_open { self.low.checked_add(1)? } else { self.low };
        let hi = match self.high {
            Bound::Infinite => Bound::Infinite,
            Bound::Finite(h) if self.high_open => Bound::Finite(h.checked_sub(1)?),
            Bound::Finite(h) => Bound::Finite(h),
        };
        match hi {
            Bound::Finite(h) if lo > h => None,
            _ => Some((lo, hi)),
        }
    }

    /// Membership of an integer time point.
    pub fn contains(&self, t: u32) -> bool {
        match self.integer_bounds() {
            Some((lo, hi)) => t >= lo && Bound::Finite(t) <= hi,
            None => false,
        }
    }

    /// Integer-point inclusion: every integer of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &TimeInterval) -> bool {
        match (self.integer_bounds(), other.integer_bounds()) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((a, b)), Some((c, d))) => a >= c && b <= d,
        }
    }

    /// Largest finite constant mentioned by the interval.
    pub fn max_constant(&self) -> u32 {
        match self.high {
            Bound::Finite(h) => h.max(self.low),
            Bound::Infinite => self.low,
        }
    }

    /// The downward closure `I↓`: everything at or below some element of `I`.
    pub fn downward_closure(&self) -> TimeInterval {
        TimeInterval {
            low: 0,
            high: self.high,
            low_open: false,
            high_open: self.high_open,
        }
    }

    /// The upward closure `I↑`: everything at or above some element of `I`.
    pub fn upward_closure(&self) -> TimeInterval {
        TimeInterval {
            low: self.low,
            high: Bound::Infinite,
            low_open: self.low_open,
            high_open: true,
        }
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.low_open { ']' } else { '[' };
        let r = if self.high_open { '[' } else { ']' };
        write!(f, "{l}{},{}{r}", self.low, self.high)
    }
}
