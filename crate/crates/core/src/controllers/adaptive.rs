//! Adaptive integral sliding-mode layer.

use serde::{Deserialize, Serialize};

use super::{sign, ControllerState, ErrorState, Switching};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdaptiveParams {
    /// Adaptation rates for `ξ̂₀, ξ̂₁, ξ̂₂`.
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    /// Linear and power-rate reaching gains on `ψ_a`.
    pub k3: f64,
    pub k4: f64,
    pub p2: f64,
    /// Decay rate of the initial-condition memory, 1/s.
    pub theta: f64,
    /// Boundary-layer half-width.
    pub phi: f64,
    pub xi_init: [f64; 3],
    pub xi_floor: [f64; 3],
    /// Growth rates applied while a gain sits at or below its floor.
    pub k_bar: [f64; 3],
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        Self {
            k0: 0.5,
            k1: 0.05,
            k2: 0.05,
            k3: 1.0,
            k4: 0.1,
            p2: 0.5,
            theta: 1.0,
            phi: 2.0,
            xi_init: [0.1, 0.01, 0.01],
            xi_floor: [0.05, 0.005, 0.005],
            k_bar: [0.01, 0.001, 0.001],
        }
    }
}

impl AdaptiveParams {
    pub fn validate(&self) -> Result<()> {
        let scalars = [self.k0, self.k1, self.k2, self.k3, self.k4, self.p2, self.theta, self.phi];
        let arrays = self.xi_init.iter().chain(&self.xi_floor).chain(&self.k_bar);
        let all_finite = scalars.iter().chain(arrays).all(|v| v.is_finite());
        let checks = [
            (all_finite, "all parameters must be finite"),
            (scalars[..5].iter().all(|&k| k >= 0.0), "k0..k4 must be >= 0"),
            (self.p2 > 0.0 && self.p2 <= 1.0, "p2 must lie in (0, 1]"),
            (self.theta > 0.0, "theta must be > 0"),
            (self.phi > 0.0, "phi must be > 0"),
            (self.xi_init.iter().all(|&x| x > 0.0), "xi_init must be > 0"),
            (self.xi_floor.iter().all(|&x| x > 0.0), "xi_floor must be > 0"),
            (self.k_bar.iter().all(|&x| x > 0.0), "k_bar must be > 0"),
            (
                self.xi_init.iter().zip(&self.xi_floor).all(|(i, f)| f <= i),
                "xi_floor must not exceed xi_init",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            None => Ok(()),
            Some((_, msg)) => Err(Error::Config(format!("adaptive: {msg}"))),
        }
    }
}

/// Adaptation law for the `ξ̂` gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainLaw {
    /// Monotone growth proportional to `|ψ_a|`.
    Basic,
    /// Gains shrink inside the boundary layer and grow outside it, never
    /// dropping below `xi_floor`.
    BoundaryLayer,
}

/// `ψ_a = ε₂ + z − e^{−θt}(ε₂(0) + z(0))`. Zero at `t = 0` by construction.
pub fn integral_surface(es: &ErrorState, cs: &ControllerState, theta: f64) -> Result<f64> {
    let (eps2_0, z_0) = cs.memory()?;
    Ok(es.eps2 + cs.z - (-theta * cs.t).exp() * (eps2_0 + z_0))
}

/// `Γ = θ·e^{−θt}(ε₂(0) + z(0))`.
pub fn gamma_term(cs: &ControllerState, theta: f64) -> Result<f64> {
    let (eps2_0, z_0) = cs.memory()?;
    Ok(theta * (-theta * cs.t).exp() * (eps2_0 + z_0))
}

/// `h_a = −(k₃ψ + k₄|ψ|^{p₂}s(ψ) + |Γ|s(ψ) + (ξ̂₀ + ξ̂₁|ε₁| + ξ̂₂|ε₂|)s(ψ)) / K_m`.
pub fn adaptive_control(
    psi_a: f64,
    es: &ErrorState,
    gamma: f64,
    cs: &ControllerState,
    p: &AdaptiveParams,
    k_min: f64,
    switching: Switching,
) -> f64 {
    let s = switching.apply(psi_a);
    let [x0, x1, x2] = cs.xi_hat;
    let bound = x0 + x1 * es.eps1.abs() + x2 * es.eps2.abs();
    let total = p.k3 * psi_a + p.k4 * psi_a.abs().powf(p.p2) * s + gamma.abs() * s + bound * s;
    -total / k_min
}

/// One explicit-Euler step of the gain adaptation. Only `xi_hat` changes.
pub fn update_adaptive_gains(
    psi_a: f64,
    es: &ErrorState,
    dt: f64,
    cs: &ControllerState,
    p: &AdaptiveParams,
    law: GainLaw,
) -> ControllerState {
    let factors = [1.0, es.eps1.abs(), es.eps2.abs()];
    let rates = [p.k0, p.k1, p.k2];
    let mut next = *cs;
    for i in 0..3 {
        let drive = rates[i] * psi_a.abs() * factors[i];
        next.xi_hat[i] = match law {
            GainLaw::Basic => cs.xi_hat[i] + drive * dt,
            GainLaw::BoundaryLayer => {
                let rate = if cs.xi_hat[i] > p.xi_floor[i] {
                    drive * sign(psi_a.abs() - p.phi)
                } else {
                    p.k_bar[i]
                };
                (cs.xi_hat[i] + rate * dt).max(p.xi_floor[i])
            }
        };
    }
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn started(eps2_0: f64, z_0: f64) -> ControllerState {
        let mut cs = ControllerState::new([0.2, 0.1, 0.1]);
        cs.z = z_0;
        cs.initialize(&ErrorState::new(0.0, eps2_0));
        cs
    }

    #[test]
    fn surface_is_zero_at_start() {
        for (e, z) in [(0.0, 0.0), (3.0, -1.0), (-7.5, 2.25)] {
            let cs = started(e, z);
            assert_eq!(integral_surface(&ErrorState::new(1.0, e), &cs, 0.8).unwrap(), 0.0);
        }
    }

    #[test]
    fn surface_forgets_initial_condition() {
        let mut cs = started(2.0, 1.0);
        cs.z = 0.5;
        cs.t = 1.0;
        let es = ErrorState::new(0.0, -0.3);
        assert_relative_eq!(integral_surface(&es, &cs, 1e6).unwrap(), 0.2, epsilon = 1e-12);
        assert_relative_eq!(
            integral_surface(&es, &cs, 0.5).unwrap(),
            -0.3 + 0.5 - (-0.5f64).exp() * 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gamma_examples() {
        let mut cs = started(0.4, -0.4);
        cs.t = 3.0;
        assert_eq!(gamma_term(&cs, 2.0).unwrap(), 0.0);

        let mut cs = started(0.75, 0.25);
        assert_eq!(gamma_term(&cs, 2.0).unwrap(), 2.0);
        cs.t = 2.0f64.ln() / 2.0;
        assert_relative_eq!(gamma_term(&cs, 2.0).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_control_examples() {
        let p = AdaptiveParams { k3: 1.0, k4: 0.0, ..AdaptiveParams::default() };
        let mut cs = ControllerState::new([0.5, 0.0, 0.0]);
        cs.xi_hat = [0.5, 0.0, 0.0];
        let es = ErrorState::default();
        assert_eq!(adaptive_control(0.0, &es, 0.0, &cs, &p, 1.0, Switching::Sign), 0.0);
        assert_relative_eq!(adaptive_control(1.0, &es, 0.0, &cs, &p, 1.0, Switching::Sign), -1.5);
    }

    #[test]
    fn basic_law_grows_with_surface() {
        let p = AdaptiveParams::default();
        let cs = ControllerState::new(p.xi_init);
        let es = ErrorState::new(1.0, -2.0);
        assert_eq!(update_adaptive_gains(0.0, &es, 0.01, &cs, &p, GainLaw::Basic), cs);
        let next = update_adaptive_gains(0.3, &es, 0.01, &cs, &p, GainLaw::Basic);
        for i in 0..3 {
            assert!(next.xi_hat[i] > cs.xi_hat[i]);
        }
        assert_relative_eq!(next.xi_hat[2], cs.xi_hat[2] + p.k2 * 0.3 * 2.0 * 0.01);
    }

    #[test]
    fn boundary_law_shrinks_inside_and_respects_floor() {
        let p = AdaptiveParams::default();
        let cs = ControllerState::new(p.xi_init);
        let es = ErrorState::new(1.0, 1.0);
        let inside = update_adaptive_gains(0.5 * p.phi, &es, 0.01, &cs, &p, GainLaw::BoundaryLayer);
        let outside = update_adaptive_gains(2.0 * p.phi, &es, 0.01, &cs, &p, GainLaw::BoundaryLayer);
        for i in 0..3 {
            assert!(inside.xi_hat[i] < cs.xi_hat[i]);
            assert!(outside.xi_hat[i] > cs.xi_hat[i]);
        }

        let mut at_floor = cs;
        at_floor.xi_hat = p.xi_floor;
        let next = update_adaptive_gains(0.1 * p.phi, &es, 0.01, &at_floor, &p, GainLaw::BoundaryLayer);
        for i in 0..3 {
            assert_relative_eq!(next.xi_hat[i], p.xi_floor[i] + p.k_bar[i] * 0.01);
        }

        let big_step = update_adaptive_gains(0.0, &ErrorState::new(50.0, 50.0), 10.0, &cs, &p, GainLaw::BoundaryLayer);
        assert_eq!(big_step.xi_hat, cs.xi_hat);
        let shrink = update_adaptive_gains(0.1 * p.phi, &ErrorState::new(1e3, 1e3), 10.0, &cs, &p, GainLaw::BoundaryLayer);
        for i in 0..3 {
            assert_eq!(shrink.xi_hat[i], p.xi_floor[i]);
        }
    }

    #[test]
    fn validation() {
        AdaptiveParams::default().validate().unwrap();
        assert!(AdaptiveParams { p2: 1.5, ..AdaptiveParams::default() }.validate().is_err());
        assert!(AdaptiveParams { phi: 0.0, ..AdaptiveParams::default() }.validate().is_err());
        assert!(AdaptiveParams { xi_floor: [1.0; 3], ..AdaptiveParams::default() }.validate().is_err());
    }
}
