use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::lead::LeadProfile;
use super::metrics::MetricsConfig;
use crate::authority::AllocationParams;
use crate::controllers::{AdaptiveParams, FtsmcParams, PidParams, SmcMode};
use crate::driver_state::{reaction_time_trace, read_landmarks_file, FuzzyRuleBase, LandmarkLayout};
use crate::error::{Error, Result};
use crate::vehicle::IdmParams;

/// Where the reaction time comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverSource {
    Constant { reaction_time: f64 },
    /// Piecewise-linear `(t, R)` points, held outside the table.
    Scripted { points: Vec<[f64; 2]> },
    /// Landmark CSV pushed through the fuzzy estimator; frame `n` covers
    /// `[n/fps, (n+1)/fps)` relative to the first frame.
    Landmarks {
        path: PathBuf,
        /// Rule-base TOML; the built-in rule base when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rules: Option<PathBuf>,
        fps: f64,
        #[serde(default = "default_window")]
        window: usize,
    },
}

fn default_window() -> usize {
    15
}

impl Default for DriverSource {
    fn default() -> Self {
        DriverSource::Constant { reaction_time: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Adaptive integral layer plus terminal layer.
    #[default]
    AFtsmc,
    /// Terminal layer only.
    Ftsmc,
    Pid,
    /// Driver model alone.
    None,
}

/// Gap the assistance controllers regulate to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapReference {
    /// `s0 + T·v_lead`: the model's equilibrium gap behind the current
    /// leader. Depends only on the leader, so the follower's own
    /// acceleration reaches the gap error through two integrations.
    #[default]
    Equilibrium,
    /// The full dynamic desired gap of the driver model, including the
    /// follower speed and the approach-rate term.
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ActuatorLimits {
    /// Strongest braking the controller may request (negative), m/s².
    pub a_min: f64,
    pub a_max: f64,
}

impl Default for ActuatorLimits {
    fn default() -> Self {
        Self { a_min: -6.0, a_max: 3.0 }
    }
}

/// Everything that defines one closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub name: String,
    /// Simulated time, s.
    pub duration: f64,
    /// Spacing of logged rows, s; a whole multiple of the step.
    pub log_interval: f64,
    pub initial_gap: f64,
    pub initial_v_lead: f64,
    pub initial_v_follow: f64,
    pub controller: ControllerKind,
    pub smc_mode: SmcMode,
    pub gap_reference: GapReference,
    /// Below this authority share the controller is disengaged.
    pub eta_floor: f64,
    /// Largest reaction time the delay buffer must hold, s.
    pub r_max_supported: f64,
    pub lead: LeadProfile,
    pub driver: DriverSource,
    pub idm: IdmParams,
    pub allocation: AllocationParams,
    pub ftsmc: FtsmcParams,
    pub adaptive: AdaptiveParams,
    pub pid: PidParams,
    pub actuator: ActuatorLimits,
    pub metrics: MetricsConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "run".into(),
            duration: 100.0,
            log_interval: 0.1,
            initial_gap: 30.0,
            initial_v_lead: 20.0,
            initial_v_follow: 20.0,
            controller: ControllerKind::default(),
            smc_mode: SmcMode::default(),
            gap_reference: GapReference::default(),
            eta_floor: 0.05,
            r_max_supported: 3.0,
            lead: LeadProfile::default(),
            driver: DriverSource::default(),
            idm: IdmParams::default(),
            allocation: AllocationParams::default(),
            ftsmc: FtsmcParams::default(),
            adaptive: AdaptiveParams::default(),
            pid: PidParams::default(),
            actuator: ActuatorLimits::default(),
            metrics: MetricsConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn dt(&self) -> f64 {
        self.idm.dt
    }

    /// Integration steps covering `duration`.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt()).round() as usize
    }

    /// Integration steps per logged row.
    pub fn log_every(&self) -> usize {
        ((self.log_interval / self.dt()).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        self.idm.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.allocation.validate()?;
        self.ftsmc.validate()?;
        self.adaptive.validate()?;
        self.pid.validate()?;
        self.lead.validate()?;
        self.metrics.validate()?;
        let dt = self.dt();
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return cfg(format!("duration must be > 0, got {}", self.duration));
        }
        let ratio = self.log_interval / dt;
        if !(self.log_interval >= dt && (ratio - ratio.round()).abs() < 1e-6) {
            return cfg(format!(
                "log_interval {} must be a positive whole multiple of dt {dt}",
                self.log_interval
            ));
        }
        if !(self.initial_gap.is_finite() && self.initial_gap > 0.0) {
            return cfg(format!("initial_gap must be > 0, got {}", self.initial_gap));
        }
        for (name, v) in [("initial_v_lead", self.initial_v_lead), ("initial_v_follow", self.initial_v_follow)] {
            if !(v.is_finite() && v >= 0.0) {
                return cfg(format!("{name} must be finite and >= 0, got {v}"));
            }
        }
        if !(self.eta_floor > 0.0 && self.eta_floor <= 1.0) {
            return cfg(format!("eta_floor must lie in (0, 1], got {}", self.eta_floor));
        }
        if !(self.r_max_supported.is_finite() && self.r_max_supported >= 0.0) {
            return cfg(format!("r_max_supported must be >= 0, got {}", self.r_max_supported));
        }
        let a = self.actuator;
        if !(a.a_min.is_finite() && a.a_max.is_finite() && a.a_min < 0.0 && a.a_max > 0.0) {
            return cfg(format!("actuator limits need a_min < 0 < a_max, got {a:?}"));
        }
        let r_ok = |r: f64| r.is_finite() && r >= 0.0 && r <= self.r_max_supported;
        match &self.driver {
            DriverSource::Constant { reaction_time } if !r_ok(*reaction_time) => cfg(format!(
                "reaction_time {reaction_time} outside [0, {}]",
                self.r_max_supported
            )),
            DriverSource::Scripted { points } => {
                if points.is_empty() {
                    return cfg("scripted driver needs at least one point".into());
                }
                if points.iter().any(|[t, r]| !t.is_finite() || !r_ok(*r)) {
                    return cfg(format!(
                        "scripted reaction times must be finite and within [0, {}]",
                        self.r_max_supported
                    ));
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return cfg("scripted driver times must be strictly increasing".into());
                }
                Ok(())
            }
            DriverSource::Landmarks { fps, window, .. } => {
                if !(fps.is_finite() && *fps > 0.0) || *window == 0 {
                    return cfg(format!("landmark driver needs fps > 0 and window >= 1, got {fps}, {window}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Reads whatever the driver source needs from disk and returns a
    /// time-indexed reaction-time function.
    pub fn resolve_driver(&self) -> Result<ReactionSchedule> {
        match &self.driver {
            DriverSource::Constant { reaction_time } => Ok(ReactionSchedule::Constant(*reaction_time)),
            DriverSource::Scripted { points } => Ok(ReactionSchedule::Linear(points.clone())),
            DriverSource::Landmarks { path, rules, fps, window } => {
                let rb = match rules {
                    Some(p) => FuzzyRuleBase::load(p)?,
                    None => FuzzyRuleBase::default(),
                };
                let (_, hi) = rb.consequent_range();
                if hi > self.r_max_supported {
                    return Err(Error::Config(format!(
                        "rule base can emit R = {hi} s, beyond r_max_supported = {}",
                        self.r_max_supported
                    )));
                }
                let frames = read_landmarks_file(path)?;
                let trace = reaction_time_trace(&frames, &rb, &LandmarkLayout::default(), *window)?;
                if trace.is_empty() {
                    return Err(Error::Config(format!("{} has no frames", path.display())));
                }
                Ok(ReactionSchedule::Frames {
                    fps: *fps,
                    values: trace.iter().map(|s| s.reaction_time).collect(),
                })
            }
        }
    }

    /// Times at which the leader's acceleration changes.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.lead.breakpoints()
    }
}

/// Reaction time as a function of simulated time.
#[derive(Debug, Clone, PartialEq)]
pub enum ReactionSchedule {
    Constant(f64),
    Linear(Vec<[f64; 2]>),
    Frames { fps: f64, values: Vec<f64> },
}

impl ReactionSchedule {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            ReactionSchedule::Constant(r) => *r,
            ReactionSchedule::Linear(points) => {
                let i = points.partition_point(|p| p[0] <= t);
                if i == 0 {
                    points[0][1]
                } else if i == points.len() {
                    points[i - 1][1]
                } else {
                    let ([t0, r0], [t1, r1]) = (points[i - 1], points[i]);
                    r0 + (r1 - r0) * (t - t0) / (t1 - t0)
                }
            }
            ReactionSchedule::Frames { fps, values } => {
                let idx = (t * fps + 1e-9).floor().max(0.0) as usize;
                values[idx.min(values.len() - 1)]
            }
        }
    }
}
