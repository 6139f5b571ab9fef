//! Leader speed profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cruise speed at the start of the ramp-weaving profile, m/s.
pub const WEAVING_CRUISE: f64 = 20.0;
/// Low-speed plateau of the ramp-weaving profile, m/s.
pub const WEAVING_PLATEAU: f64 = 2.0;

/// Ramp segments of the weaving profile: `(start, end, rate)`, with holds in
/// between. The last acceleration covers `[76, 92]` as one ramp.
const WEAVING_RAMPS: [(f64, f64, f64); 4] = [
    (20.0, 26.0, -3.0),
    (36.0, 42.0, 2.5),
    (60.0, 66.0, -3.0),
    (76.0, 92.0, 2.5),
];

/// Ends of the low-speed plateaus; the speed is reset to
/// [`WEAVING_PLATEAU`] once the preceding deceleration window closes.
const WEAVING_PLATEAUS: [(f64, f64); 2] = [(26.0, 36.0), (66.0, 76.0)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LeadProfile {
    /// Two brake-and-recover cycles between cruise and a 2 m/s crawl.
    ///
    /// By default the second deceleration stops at the plateau speed (it
    /// starts from 17 m/s, so a full 6 s ramp would go negative) and the
    /// final acceleration stops at the 20 m/s cruise speed. `literal = true`
    /// instead floors the second deceleration at 0, jumps to the plateau at
    /// t = 66 s and lets the last ramp run to 42 m/s.
    RampWeaving {
        #[serde(default)]
        literal: bool,
    },
    /// Piecewise-linear interpolation through `(t, v)` points, held
    /// constant outside the table.
    Table { points: Vec<[f64; 2]> },
    Constant { speed: f64 },
}

impl Default for LeadProfile {
    fn default() -> Self {
        LeadProfile::RampWeaving { literal: false }
    }
}

impl LeadProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            LeadProfile::RampWeaving { .. } => Ok(()),
            LeadProfile::Constant { speed } => {
                if speed.is_finite() && *speed >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Config(format!("lead speed must be finite and >= 0, got {speed}")))
                }
            }
            LeadProfile::Table { points } => {
                if points.is_empty() {
                    return Err(Error::Config("lead table needs at least one point".into()));
                }
                if points.iter().any(|[t, v]| !t.is_finite() || !v.is_finite() || *v < 0.0) {
                    return Err(Error::Config("lead table entries must be finite with v >= 0".into()));
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(Error::Config("lead table times must be strictly increasing".into()));
                }
                Ok(())
            }
        }
    }

    /// Leader speed at time `t`, m/s.
    pub fn speed(&self, t: f64) -> f64 {
        match self {
            LeadProfile::RampWeaving { literal } => weaving_speed(t, *literal),
            LeadProfile::Table { points } => table_speed(points, t),
            LeadProfile::Constant { speed } => *speed,
        }
    }

    /// Leader acceleration at `t` (right derivative), m/s².
    pub fn accel(&self, t: f64) -> f64 {
        match self {
            LeadProfile::RampWeaving { literal } => weaving_accel(t, *literal),
            LeadProfile::Table { points } => {
                let i = points.partition_point(|p| p[0] <= t);
                if i == 0 || i == points.len() {
                    0.0
                } else {
                    let ([t0, v0], [t1, v1]) = (points[i - 1], points[i]);
                    (v1 - v0) / (t1 - t0)
                }
            }
            LeadProfile::Constant { .. } => 0.0,
        }
    }

    /// Times at which the acceleration changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            LeadProfile::RampWeaving { literal } => weaving_breakpoints(*literal),
            LeadProfile::Table { points } => points.iter().map(|p| p[0]).collect(),
            LeadProfile::Constant { .. } => Vec::new(),
        }
    }
}

fn limits(rate: f64, literal: bool) -> (f64, f64) {
    match (rate < 0.0, literal) {
        (true, false) => (WEAVING_PLATEAU, f64::INFINITY),
        (true, true) => (0.0, f64::INFINITY),
        (false, false) => (0.0, WEAVING_CRUISE),
        (false, true) => (0.0, f64::INFINITY),
    }
}

/// Walks the segments in order. Returns the speed at `t` and, if `t` is
/// inside a ramp that is still moving, that ramp's rate.
fn weaving_state(t: f64, literal: bool) -> (f64, f64) {
    let mut v = WEAVING_CRUISE;
    for (i, &(t0, t1, rate)) in WEAVING_RAMPS.iter().enumerate() {
        if t < t0 {
            return (v, 0.0);
        }
        let (lo, hi) = limits(rate, literal);
        let ramped = (v + rate * (t.min(t1) - t0)).clamp(lo, hi);
        if t < t1 {
            let moving = if rate < 0.0 { ramped > lo } else { ramped < hi };
            return (ramped, if moving { rate } else { 0.0 });
        }
        v = ramped;
        if let Some(&(p0, _)) = WEAVING_PLATEAUS.get(i / 2).filter(|_| i % 2 == 0) {
            if t > p0 {
                v = WEAVING_PLATEAU;
            }
        }
    }
    (v, 0.0)
}

fn weaving_speed(t: f64, literal: bool) -> f64 {
    weaving_state(t, literal).0
}

fn weaving_accel(t: f64, literal: bool) -> f64 {
    weaving_state(t, literal).1
}

fn weaving_breakpoints(literal: bool) -> Vec<f64> {
    let mut out = Vec::new();
    let mut v = WEAVING_CRUISE;
    for (i, &(t0, t1, rate)) in WEAVING_RAMPS.iter().enumerate() {
        let (lo, hi) = limits(rate, literal);
        let target = if rate < 0.0 { lo } else { hi };
        let t_hit = t0 + (target - v) / rate;
        out.push(t0);
        out.push(t_hit.min(t1));
        v = (v + rate * (t1 - t0)).clamp(lo, hi);
        if i % 2 == 0 && v != WEAVING_PLATEAU {
            // Only the literal profile jumps back to the plateau.
            out.push(WEAVING_PLATEAUS[i / 2].0);
            v = WEAVING_PLATEAU;
        }
    }
    out.dedup();
    out
}

fn table_speed(points: &[[f64; 2]], t: f64) -> f64 {
    let i = points.partition_point(|p| p[0] <= t);
    if i == 0 {
        points[0][1]
    } else if i == points.len() {
        points[i - 1][1]
    } else {
        let ([t0, v0], [t1, v1]) = (points[i - 1], points[i]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}
