//! Gap-tracking controllers.
//!
//! The sliding-mode laws work in *error space*: with
//! `ε₁ = gap − s*` and `ε₂ = ε̇₁`, the error dynamics are
//! `ε̇₂ = χ + γ·u`, where `u` is the controller output and `γ` the share of
//! authority the controller holds. Because the follower's acceleration
//! enters `ε̇₂` with a negative sign, the acceleration the vehicle is asked
//! to produce is `−u` (see [`SlidingModeController::step`] callers in the
//! simulator). The PID baseline produces an acceleration directly.

mod adaptive;
mod ftsmc;
mod lyapunov;
mod pid;

pub use adaptive::{
    adaptive_control, gamma_term, integral_surface, update_adaptive_gains, AdaptiveParams, GainLaw,
};
pub use ftsmc::{ftsmc_control, switching_gain, terminal_exponent, terminal_surface, FtsmcParams};
pub use lyapunov::settling_time_bound;
pub use pid::{PidController, PidParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vehicle::VehiclePair;

/// Gap error and its rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorState {
    /// `gap − s*`, m.
    pub eps1: f64,
    /// `(v_lead − v_follow) − ds*/dt`, m/s.
    pub eps2: f64,
}

impl ErrorState {
    pub fn new(eps1: f64, eps2: f64) -> Self {
        Self { eps1, eps2 }
    }
}

pub fn tracking_errors(pair: &VehiclePair, s_star: f64, s_star_rate: f64) -> ErrorState {
    ErrorState {
        eps1: pair.gap() - s_star,
        eps2: (pair.v_lead - pair.v_follow) - s_star_rate,
    }
}

/// Sign with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Boundary-layer saturation: linear inside `[−φ, φ]`, `sign` outside.
pub fn sat(psi: f64, phi: f64) -> f64 {
    if psi.abs() <= phi {
        psi / phi
    } else {
        sign(psi)
    }
}

/// Discontinuous switching or its boundary-layer approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Switching {
    Sign,
    Saturation { phi: f64 },
}

impl Switching {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Switching::Sign => sign(x),
            Switching::Saturation { phi } => sat(x, phi),
        }
    }
}

/// Plain sliding mode (sign switching, monotone adaptive gains) or the
/// refined variant (saturation switching, boundary-layer gain law).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmcMode {
    Basic,
    #[default]
    Refined,
}

/// Integral state, adaptive gains and the initial-condition memory of the
/// integral surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub z: f64,
    /// `(ε₂(0), z(0))`, captured by [`ControllerState::initialize`].
    pub memory: Option<(f64, f64)>,
    /// Elapsed time since initialization, s.
    pub t: f64,
    pub xi_hat: [f64; 3],
}

impl ControllerState {
    pub fn new(xi_init: [f64; 3]) -> Self {
        Self {
            z: 0.0,
            memory: None,
            t: 0.0,
            xi_hat: xi_init,
        }
    }

    pub fn initialize(&mut self, es: &ErrorState) {
        self.memory = Some((es.eps2, self.z));
        self.t = 0.0;
    }

    /// Drops the integral state and the initial-condition memory so the
    /// next evaluation starts a fresh surface. Adapted gains are kept.
    pub fn reset_surface(&mut self) {
        self.z = 0.0;
        self.memory = None;
        self.t = 0.0;
    }

    pub fn is_initialized(&self) -> bool {
        self.memory.is_some()
    }

    pub(crate) fn memory(&self) -> Result<(f64, f64)> {
        self.memory.ok_or(Error::Uninitialized)
    }
}

/// Everything one evaluation of the two-layer controller produces.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlOutput {
    /// `h_a + h_n`, error-space command.
    pub h: f64,
    pub h_n: f64,
    pub h_a: f64,
    pub psi_n: f64,
    pub psi_a: f64,
    pub q: f64,
    /// `A(t)`.
    pub switching_gain: f64,
    /// `Γ(t)`.
    pub gamma: f64,
}

/// Two-layer law `h = h_a + h_n` for the current state.
pub fn combined_control(
    es: &ErrorState,
    cs: &ControllerState,
    pf: &FtsmcParams,
    pa: &AdaptiveParams,
    mode: SmcMode,
) -> Result<ControlOutput> {
    let switching = match mode {
        SmcMode::Basic => Switching::Sign,
        SmcMode::Refined => Switching::Saturation { phi: pa.phi },
    };
    let q = terminal_exponent(es.eps2, pf.delta, pf.eps_switch);
    let psi_n = terminal_surface(es, pf.beta, q);
    let h_n = ftsmc_control(es, psi_n, cs.t, pf, switching);
    let psi_a = integral_surface(es, cs, pa.theta)?;
    let gamma = gamma_term(cs, pa.theta)?;
    let h_a = adaptive_control(psi_a, es, gamma, cs, pa, pf.k_min, switching);
    Ok(ControlOutput {
        h: h_a + h_n,
        h_n,
        h_a,
        psi_n,
        psi_a,
        q,
        switching_gain: switching_gain(cs.t, pf),
        gamma,
    })
}

/// Stateful wrapper around [`combined_control`].
///
/// [`evaluate`](Self::evaluate) computes the law for the current errors;
/// [`advance`](Self::advance) then moves the integral state, the adaptive
/// gains and time forward by one explicit-Euler step.
#[derive(Debug, Clone)]
pub struct SlidingModeController {
    pub ftsmc: FtsmcParams,
    pub adaptive: AdaptiveParams,
    pub mode: SmcMode,
    pub state: ControllerState,
}

impl SlidingModeController {
    pub fn new(ftsmc: FtsmcParams, adaptive: AdaptiveParams, mode: SmcMode) -> Result<Self> {
        ftsmc.validate()?;
        adaptive.validate()?;
        Ok(Self {
            state: ControllerState::new(adaptive.xi_init),
            ftsmc,
            adaptive,
            mode,
        })
    }

    /// Evaluates the law, capturing the initial-condition memory on the
    /// first call after construction or a reset.
    pub fn evaluate(&mut self, es: &ErrorState) -> Result<ControlOutput> {
        if !self.state.is_initialized() {
            self.state.initialize(es);
        }
        combined_control(es, &self.state, &self.ftsmc, &self.adaptive, self.mode)
    }

    /// Advances the controller after `out` was evaluated at `es`.
    ///
    /// `applied` is the error-space command that actually reached the plant
    /// (after actuator limits) and `gamma` the control effectiveness it was
    /// applied with. The integral state follows the part of the terminal
    /// command that was delivered, `ż = −γ·(applied/h)·h_n`, so saturation
    /// or partial authority cannot wind it up. With `gamma = 1` and
    /// `applied = out.h` this is `ż = −h_n`.
    pub fn advance(&mut self, out: &ControlOutput, es: &ErrorState, applied: f64, gamma: f64, dt: f64) {
        let law = match self.mode {
            SmcMode::Basic => GainLaw::Basic,
            SmcMode::Refined => GainLaw::BoundaryLayer,
        };
        let share = if out.h != 0.0 { (applied / out.h).clamp(0.0, 1.0) } else { 1.0 };
        let mut next = update_adaptive_gains(out.psi_a, es, dt, &self.state, &self.adaptive, law);
        next.z -= gamma * share * out.h_n * dt;
        next.t += dt;
        self.state = next;
    }

    /// [`evaluate`](Self::evaluate) then [`advance`](Self::advance) with the
    /// full command applied at unit effectiveness.
    pub fn step(&mut self, es: &ErrorState, dt: f64) -> Result<ControlOutput> {
        let out = self.evaluate(es)?;
        self.advance(&out, es, out.h, 1.0, dt);
        Ok(out)
    }
}

/// Terminal sliding-mode layer on its own (no integral surface, no
/// adaptation).
#[derive(Debug, Clone)]
pub struct TerminalController {
    pub params: FtsmcParams,
    pub switching: Switching,
    pub t: f64,
}

impl TerminalController {
    pub fn new(params: FtsmcParams, switching: Switching) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, switching, t: 0.0 })
    }

    pub fn step(&mut self, es: &ErrorState, dt: f64) -> ControlOutput {
        let q = terminal_exponent(es.eps2, self.params.delta, self.params.eps_switch);
        let psi_n = terminal_surface(es, self.params.beta, q);
        let h_n = ftsmc_control(es, psi_n, self.t, &self.params, self.switching);
        let out = ControlOutput {
            h: h_n,
            h_n,
            psi_n,
            q,
            switching_gain: switching_gain(self.t, &self.params),
            ..ControlOutput::default()
        };
        self.t += dt;
        out
    }
}
