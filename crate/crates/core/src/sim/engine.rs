//! Fixed-step closed loop: reaction time → authority → delayed driver
//! model → assistance controller → blend → kinematics.

use super::scenario::{ControllerKind, GapReference, ReactionSchedule, ScenarioConfig};
use super::trace::{Trace, TraceRow, TRACE_HEADER};
use crate::authority::{authority_factor_unchecked, blend_accel};
use crate::controllers::{
    terminal_exponent, terminal_surface, tracking_errors, ErrorState, PidController, SlidingModeController,
    SmcMode, Switching, TerminalController,
};
use crate::error::{Error, Result};
use crate::history::HistoryBuffer;
use crate::vehicle::{desired_gap, idm_rtd_accel, step_kinematics, VehiclePair};

enum Assist {
    Smc(SlidingModeController),
    Terminal(TerminalController),
    Pid(PidController),
    None,
}

/// What the assistance layer produced on one step, in the acceleration
/// sense.
#[derive(Default)]
struct Command {
    h: f64,
    h_n: f64,
    h_a: f64,
    psi_n: f64,
    psi_a: f64,
}

impl Assist {
    fn new(cfg: &ScenarioConfig) -> Result<Self> {
        Ok(match cfg.controller {
            ControllerKind::AFtsmc => {
                Assist::Smc(SlidingModeController::new(cfg.ftsmc, cfg.adaptive, cfg.smc_mode)?)
            }
            ControllerKind::Ftsmc => {
                let switching = match cfg.smc_mode {
                    SmcMode::Basic => Switching::Sign,
                    SmcMode::Refined => Switching::Saturation { phi: cfg.adaptive.phi },
                };
                Assist::Terminal(TerminalController::new(cfg.ftsmc, switching)?)
            }
            ControllerKind::Pid => Assist::Pid(PidController::new(cfg.pid)?),
            ControllerKind::None => Assist::None,
        })
    }

    fn disengage(&mut self) {
        match self {
            Assist::Smc(c) => c.state.reset_surface(),
            Assist::Terminal(c) => c.t = 0.0,
            Assist::Pid(c) => c.reset(),
            Assist::None => {}
        }
    }

    fn xi(&self) -> [f64; 3] {
        match self {
            Assist::Smc(c) => c.state.xi_hat,
            _ => [0.0; 3],
        }
    }

    /// Error-space laws produce `u` with `ε̇₂ = χ + γu`; the follower is
    /// asked for `−u`. PID already returns an acceleration. `limit` maps a
    /// requested acceleration to what the actuator delivers.
    fn command(&mut self, es: &ErrorState, eta: f64, dt: f64, limit: impl Fn(f64) -> f64) -> Result<Command> {
        Ok(match self {
            Assist::Smc(c) => {
                let out = c.evaluate(es)?;
                let h = limit(-out.h);
                c.advance(&out, es, -h, eta, dt);
                Command { h: -out.h, h_n: -out.h_n, h_a: -out.h_a, psi_n: out.psi_n, psi_a: out.psi_a }
            }
            Assist::Terminal(c) => {
                let out = c.step(es, dt);
                Command { h: -out.h, h_n: -out.h_n, h_a: 0.0, psi_n: out.psi_n, psi_a: 0.0 }
            }
            Assist::Pid(c) => Command { h: c.update(es.eps1, dt), ..Command::default() },
            Assist::None => Command::default(),
        })
    }
}

/// Validates `cfg`, resolves the driver source and runs it.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Trace> {
    cfg.validate()?;
    let schedule = cfg.resolve_driver()?;
    run_with_schedule(cfg, &schedule)
}

/// Runs `cfg` with an already-resolved reaction-time schedule.
///
/// Rows are logged every `log_interval`. If the gap becomes non-positive the
/// run stops and one extra row holding the post-step state is appended at
/// the collision time, which may fall between logging instants.
pub fn run_with_schedule(cfg: &ScenarioConfig, schedule: &ReactionSchedule) -> Result<Trace> {
    let dt = cfg.dt();
    let every = cfg.log_every();
    let idm = &cfg.idm;
    let mut pair = VehiclePair::new(cfg.initial_gap, cfg.initial_v_lead, cfg.initial_v_follow);
    let capacity = HistoryBuffer::capacity_for(cfg.r_max_supported, dt);
    let mut history = HistoryBuffer::prefilled(capacity, pair.snapshot());
    let mut assist = Assist::new(cfg)?;
    let mut engaged = false;
    let mut prev_ref: Option<f64> = None;
    let mut trace = Trace::default();

    for i in 0..cfg.steps() {
        let t = i as f64 * dt;
        let r = schedule.at(t).clamp(0.0, cfg.r_max_supported);
        let eta_c = authority_factor_unchecked(r, &cfg.allocation);
        let engage_now = cfg.controller != ControllerKind::None && eta_c >= cfg.eta_floor;
        if engaged && !engage_now {
            assist.disengage();
        }
        engaged = engage_now;
        let eta = if engaged { eta_c } else { 0.0 };

        let a_driver = idm_rtd_accel(&history, r, idm)?;
        let s_ref = match cfg.gap_reference {
            GapReference::Equilibrium => desired_gap(pair.v_lead, 0.0, idm),
            GapReference::Dynamic => desired_gap(pair.v_follow, pair.v_follow - pair.v_lead, idm),
        };
        let s_rate = prev_ref.map_or(0.0, |p| (s_ref - p) / dt);
        let es = tracking_errors(&pair, s_ref, s_rate);

        let limit = |a: f64| a.clamp(cfg.actuator.a_min, cfg.actuator.a_max);
        // Gains the command is computed with, before this step adapts them.
        let xi = assist.xi();
        let cmd = if engaged {
            assist.command(&es, eta, dt, limit)?
        } else {
            let q = terminal_exponent(es.eps2, cfg.ftsmc.delta, cfg.ftsmc.eps_switch);
            Command { psi_n: terminal_surface(&es, cfg.ftsmc.beta, q), ..Command::default() }
        };
        let h = limit(cmd.h);
        let a_combined = blend_accel(a_driver, h, eta);

        let row = TraceRow {
            t,
            v_lead: pair.v_lead,
            v_follow: pair.v_follow,
            gap: pair.gap(),
            s_star: s_ref,
            r,
            eta_c: eta,
            a_driver,
            h,
            h_n: cmd.h_n,
            h_a: cmd.h_a,
            a_combined,
            eps1: es.eps1,
            eps2: es.eps2,
            psi_n: cmd.psi_n,
            psi_a: cmd.psi_a,
            xi,
            clamped: h != cmd.h,
        };
        check_finite(&row, i)?;
        if i % every == 0 {
            trace.rows.push(row);
        }

        let t_next = (i + 1) as f64 * dt;
        pair = step_kinematics(&pair, a_combined, cfg.lead.speed(t_next), dt);
        history.push(pair.snapshot());
        prev_ref = Some(s_ref);

        if pair.gap() <= 0.0 {
            trace.rows.push(TraceRow {
                t: t_next,
                v_lead: pair.v_lead,
                v_follow: pair.v_follow,
                gap: pair.gap(),
                ..row
            });
            trace.collision_time = Some(t_next);
            break;
        }
    }
    Ok(trace)
}

fn check_finite(row: &TraceRow, step: usize) -> Result<()> {
    match row.values().iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(k) => Err(Error::NonFinite { step, field: TRACE_HEADER[k] }),
    }
}
