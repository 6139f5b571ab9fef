use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gap-error PID gains. The integral of `ε₁` is clamped to
/// `±integral_limit` (m·s) to avoid windup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidParams {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub integral_limit: f64,
}

impl Default for PidParams {
    fn default() -> Self {
        Self { kp: 2.25, ki: 0.05, kd: 3.0, integral_limit: 20.0 }
    }
}

impl PidParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.kp, self.ki, self.kd, self.integral_limit].iter().all(|v| v.is_finite());
        if finite && self.integral_limit >= 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!("pid: gains must be finite and integral_limit >= 0, got {self:?}")))
        }
    }
}

#[derive(Debug, Clone)]
pub struct PidController {
    pub params: PidParams,
    integral: f64,
    prev: Option<f64>,
}

impl PidController {
    pub fn new(params: PidParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, integral: 0.0, prev: None })
    }

    /// Acceleration command for gap error `eps1`. The integral uses the
    /// trapezoidal rule; the derivative is a backward difference and is zero
    /// on the first call.
    pub fn update(&mut self, eps1: f64, dt: f64) -> f64 {
        let p = &self.params;
        let derivative = match self.prev {
            Some(prev) => {
                self.integral += 0.5 * (prev + eps1) * dt;
                (eps1 - prev) / dt
            }
            None => 0.0,
        };
        self.integral = self.integral.clamp(-p.integral_limit, p.integral_limit);
        self.prev = Some(eps1);
        p.kp * eps1 + p.ki * self.integral + p.kd * derivative
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.prev = None;
    }
}
