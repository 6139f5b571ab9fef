//! Control-authority allocation between the driver and the assistance
//! controller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationParams {
    /// Below this reaction time the driver keeps full authority, s.
    pub r_min: f64,
    /// Midpoint of the tanh transition, s.
    pub r_mid: f64,
    /// Above this reaction time the controller has full authority, s.
    pub r_max: f64,
    pub k1: f64,
    /// Transition steepness, 1/s.
    pub k2: f64,
}

impl AllocationParams {
    /// Transition with `k1 = 0.5` and a steepness that puts the tanh branch
    /// within 0.01 of 0 and 1 at the two thresholds.
    pub fn with_thresholds(r_min: f64, r_mid: f64, r_max: f64) -> Self {
        Self {
            r_min,
            r_mid,
            r_max,
            k1: 0.5,
            k2: 3.0 / (r_mid - r_min).min(r_max - r_mid),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.r_min >= 0.0
            && self.r_min < self.r_mid
            && self.r_mid < self.r_max
            && self.k1 > 0.0
            && self.k1 <= 0.5
            && self.k2 > 0.0
            && [self.r_min, self.r_mid, self.r_max, self.k1, self.k2]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "allocation needs 0 <= r_min < r_mid < r_max, k1 in (0, 0.5], k2 > 0; got {self:?}"
            )))
        }
    }
}

impl Default for AllocationParams {
    fn default() -> Self {
        Self::with_thresholds(0.3, 0.9, 1.8)
    }
}

/// Share of authority given to the controller for reaction time `r`.
pub fn authority_factor(r: f64, p: &AllocationParams) -> Result<f64> {
    p.validate()?;
    Ok(authority_factor_unchecked(r, p))
}

pub(crate) fn authority_factor_unchecked(r: f64, p: &AllocationParams) -> f64 {
    if r < p.r_min {
        0.0
    } else if r > p.r_max {
        1.0
    } else {
        (p.k1 * (1.0 + (p.k2 * (r - p.r_mid)).tanh())).clamp(0.0, 1.0)
    }
}

/// `(1 - η)·a_driver + η·h`.
pub fn blend_accel(a_driver: f64, h: f64, eta: f64) -> f64 {
    (1.0 - eta) * a_driver + eta * h
}
