//! Precision degradation by rounding to a power of ten.
//!
//! Rounding follows SQL `ROUND(x, -order)` on integers: nearest multiple of
//! `10^order`, ties away from zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Measure;

/// Number of decimal orders of magnitude removed by rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct RoundingOrder(u8);

impl RoundingOrder {
    pub const NONE: Self = Self(0);
    /// Largest order accepted without an explicit override.
    pub const DEFAULT_MAX: u8 = 3;
    /// Largest order accepted at all.
    pub const OVERRIDE_MAX: u8 = 9;

    pub fn new(order: u8) -> Result<Self> {
        if order > Self::DEFAULT_MAX {
            return Err(Error::Config(format!(
                "rounding order {order} exceeds {}; use an explicit override",
                Self::DEFAULT_MAX
            )));
        }
        Ok(Self(order))
    }

    pub fn with_override(order: u8) -> Result<Self> {
        if order > Self::OVERRIDE_MAX {
            return Err(Error::Config(format!(
                "rounding order {order} exceeds hard limit {}",
                Self::OVERRIDE_MAX
            )));
        }
        Ok(Self(order))
    }

    /// The four orders studied by default: 0, 1, 2, 3.
    pub fn standard() -> [Self; 4] {
        [Self(0), Self(1), Self(2), Self(3)]
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// `10^order`.
    pub fn step(self) -> u64 {
        10u64.pow(self.0 as u32)
    }
}

impl TryFrom<u8> for RoundingOrder {
    type Error = Error;

    fn try_from(order: u8) -> Result<Self> {
        Self::with_override(order)
    }
}

impl From<RoundingOrder> for u8 {
    fn from(order: RoundingOrder) -> u8 {
        order.0
    }
}

impl fmt::Display for RoundingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for RoundingOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let order: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("invalid rounding order `{s}`")))?;
        Self::new(order)
    }
}

/// Rounds `value` to the nearest multiple of `10^order`, ties away from zero.
///
/// Saturates to the largest representable multiple in the (unreachable for
/// measure domains) case where rounding up would overflow `u64`.
pub fn round_order(value: u64, order: RoundingOrder) -> u64 {
    if order.0 == 0 {
        return value;
    }
    let step = order.step();
    let quotient = value / step;
    let remainder = value % step;
    let down = quotient * step;
    if remainder * 2 >= step {
        down.checked_add(step).unwrap_or(down)
    } else {
        down
    }
}

/// Rounding specialised to one order, for hot loops over measures.
#[derive(Debug, Clone, Copy)]
pub struct Rounder {
    step: u64,
    half: u64,
}

impl Rounder {
    pub fn new(order: RoundingOrder) -> Self {
        let step = order.step();
        Self {
            step,
            half: step / 2,
        }
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.step == 1
    }

    #[inline]
    pub fn apply_u64(&self, value: u64) -> u64 {
        if self.step == 1 {
            return value;
        }
        let rounded = (value / self.step) * self.step;
        if value - rounded >= self.half {
            rounded.checked_add(self.step).unwrap_or(rounded)
        } else {
            rounded
        }
    }

    /// Rounds a measure known to lie within a validated domain.
    #[inline]
    pub fn apply<M: Measure>(&self, value: M) -> M {
        if self.step == 1 {
            return value;
        }
        M::narrow(self.apply_u64(value.widen())).expect("rounded measure fits its type")
    }
}

/// Checks that every measure in `[0, domain_max]` stays representable in `M`
/// after rounding at any admissible order.
pub(crate) fn check_domain_fits<M: Measure>(domain_max: u64) -> Result<()> {
    if M::narrow(domain_max).is_none() {
        return Err(Error::Config(format!(
            "domain_max {domain_max} does not fit the measure type (max {})",
            M::max_value()
        )));
    }
    for order in 0..=RoundingOrder::OVERRIDE_MAX {
        let rounded = round_order(domain_max, RoundingOrder(order));
        if M::narrow(rounded).is_none() {
            return Err(Error::Config(format!(
                "domain_max {domain_max} rounds to {rounded} at order {order}, which does not fit the measure type"
            )));
        }
    }
    Ok(())
}

/// Rounds every present measure; the missing mask and metadata are unchanged.
pub fn degrade_dataset<M: Measure>(dataset: &Dataset<M>, order: RoundingOrder) -> Dataset<M> {
    if order == RoundingOrder::NONE {
        return dataset.clone();
    }
    let rounder = Rounder::new(order);
    dataset.map_present(|v| rounder.apply(v))
}
