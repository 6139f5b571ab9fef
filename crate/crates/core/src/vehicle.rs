//! Intelligent driver model, its reaction-time-delayed variant, and the
//! longitudinal point-vehicle kinematics used by the simulator.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::history::{HistoryBuffer, Snapshot};

/// Car-following model constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdmParams {
    /// Desired (free-road) speed, m/s.
    pub v_max: f64,
    /// Minimum standstill gap, m.
    pub s0: f64,
    /// Time headway, s.
    pub t_headway: f64,
    /// Maximum acceleration, m/s².
    pub a_max: f64,
    /// Comfortable deceleration magnitude, m/s².
    pub b_comf: f64,
    /// Integration step, s.
    pub dt: f64,
}

impl Default for IdmParams {
    fn default() -> Self {
        Self {
            v_max: 40.0,
            s0: 1.5,
            t_headway: 0.45,
            a_max: 4.0,
            b_comf: 3.0,
            dt: 0.01,
        }
    }
}

impl IdmParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("v_max", self.v_max),
            ("s0", self.s0),
            ("t_headway", self.t_headway),
            ("a_max", self.a_max),
            ("b_comf", self.b_comf),
            ("dt", self.dt),
        ];
        for (name, value) in fields {
            ensure(value.is_finite() && value > 0.0, || {
                format!("idm.{name} must be finite and > 0, got {value}")
            })?;
        }
        ensure(self.dt <= 0.1, || {
            format!("idm.dt must be <= 0.1 s, got {}", self.dt)
        })
    }
}

/// Leader/follower state. The gap is always derived from the absolute
/// positions, so `gap() == x_lead - x_follow` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehiclePair {
    pub x_lead: f64,
    pub x_follow: f64,
    pub v_lead: f64,
    pub v_follow: f64,
}

impl VehiclePair {
    /// Places the follower at the origin and the leader `gap` ahead.
    pub fn new(gap: f64, v_lead: f64, v_follow: f64) -> Self {
        Self {
            x_lead: gap,
            x_follow: 0.0,
            v_lead,
            v_follow,
        }
    }

    pub fn gap(&self) -> f64 {
        self.x_lead - self.x_follow
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            v_follow: self.v_follow,
            v_lead: self.v_lead,
            gap: self.gap(),
        }
    }
}

/// Desired gap `s*` for a follower at `v_follow` closing at
/// `delta_v = v_follow - v_lead`. Not clamped: a strongly opening leader
/// can push it below `s0`.
pub fn desired_gap(v_follow: f64, delta_v: f64, p: &IdmParams) -> f64 {
    p.s0 + v_follow * p.t_headway + v_follow * delta_v / (2.0 * (p.a_max * p.b_comf).sqrt())
}

/// IDM acceleration for the given actual and desired gap.
pub fn idm_accel(v_follow: f64, gap: f64, s_star: f64, p: &IdmParams) -> Result<f64> {
    if gap <= 0.0 || gap.is_nan() {
        return Err(Error::Collision { gap });
    }
    let free = (v_follow / p.v_max).powi(4);
    let interaction = (s_star / gap).powi(2);
    Ok(p.a_max * (1.0 - free - interaction))
}

/// Number of whole steps covering a reaction time `r` (round half away
/// from zero).
pub fn delay_index(r: f64, dt: f64) -> usize {
    (r / dt).round().max(0.0) as usize
}

pub fn delayed_snapshot(h: &HistoryBuffer, k: usize) -> Result<Snapshot> {
    h.lookback(k)
}

/// IDM evaluated on the observation the driver perceived `r` seconds ago.
pub fn idm_rtd_accel(h: &HistoryBuffer, r: f64, p: &IdmParams) -> Result<f64> {
    let k = delay_index(r, p.dt);
    let d = delayed_snapshot(h, k)?;
    let s_star = desired_gap(d.v_follow, d.v_follow - d.v_lead, p);
    idm_accel(d.v_follow, d.gap, s_star, p)
}

/// One explicit-Euler step. Positions advance with the speeds held at the
/// start of the step; the follower never reverses.
pub fn step_kinematics(pair: &VehiclePair, a_follow: f64, v_lead_next: f64, dt: f64) -> VehiclePair {
    VehiclePair {
        x_lead: pair.x_lead + pair.v_lead * dt,
        x_follow: pair.x_follow + pair.v_follow * dt,
        v_lead: v_lead_next,
        v_follow: (pair.v_follow + a_follow * dt).max(0.0),
    }
}
