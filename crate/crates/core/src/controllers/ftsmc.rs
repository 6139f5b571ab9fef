//! Fast non-singular terminal sliding-mode layer.

use serde::{Deserialize, Serialize};

use super::{sign, ErrorState, Switching};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FtsmcParams {
    /// Surface gain on the rate term.
    pub beta: f64,
    /// Exponent shape, in (1, 1.5).
    pub delta: f64,
    /// `|ε₂|` threshold (m/s) at which the surface exponent switches; >= 1.
    pub eps_switch: f64,
    /// Reaching gain, must cover the uncertainty bound plus `varsigma`.
    pub alpha1: f64,
    pub alpha2: f64,
    pub varsigma: f64,
    /// Asymptotic switching-gain multiplier (>= 1).
    pub b1: f64,
    /// Initial extra switching-gain multiplier (> 0, or 0 to disable decay).
    pub b2: f64,
    /// Switching-gain decay rate, 1/s.
    pub a_decay: f64,
    /// Lower bound of the control effectiveness (the engagement floor).
    pub k_min: f64,
    pub k_max: f64,
    /// Uncertainty bound `χ̄ = chi0 + chi1·|ε₁| + chi2·|ε₂|`.
    pub chi0: f64,
    pub chi1: f64,
    pub chi2: f64,
}

impl Default for FtsmcParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            delta: 1.05,
            eps_switch: 1.0,
            alpha1: 1.0,
            alpha2: 0.05,
            varsigma: 0.2,
            b1: 1.0,
            b2: 1.0,
            a_decay: 1.0,
            k_min: 0.05,
            k_max: 1.0,
            chi0: 0.8,
            chi1: 0.0,
            chi2: 0.0,
        }
    }
}

impl FtsmcParams {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [
            self.beta, self.delta, self.eps_switch, self.alpha1, self.alpha2, self.varsigma, self.b1,
            self.b2, self.a_decay, self.k_min, self.k_max, self.chi0, self.chi1, self.chi2,
        ]
        .iter()
        .all(|v| v.is_finite());
        let checks = [
            (all_finite, "all parameters must be finite"),
            (self.beta > 0.0, "beta must be > 0"),
            (self.delta > 1.0 && self.delta < 1.5, "delta must lie in (1, 1.5)"),
            (self.eps_switch >= 1.0, "eps_switch must be >= 1"),
            (self.alpha2 >= 0.0, "alpha2 must be >= 0"),
            (self.varsigma > 0.0, "varsigma must be > 0"),
            (self.b1 >= 1.0, "b1 must be >= 1"),
            (self.b2 >= 0.0, "b2 must be >= 0"),
            (self.a_decay > 0.0, "a_decay must be > 0"),
            (self.k_min > 0.0 && self.k_min <= self.k_max, "need 0 < k_min <= k_max"),
            (
                self.chi0 >= 0.0 && self.chi1 >= 0.0 && self.chi2 >= 0.0,
                "uncertainty coefficients must be >= 0",
            ),
            (
                self.alpha1 >= self.chi0 + self.varsigma,
                "alpha1 must cover chi0 + varsigma",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            None => Ok(()),
            Some((_, msg)) => Err(Error::Config(format!("ftsmc: {msg}"))),
        }
    }

    /// `χ̄` at the given errors.
    pub fn uncertainty_bound(&self, es: &ErrorState) -> f64 {
        self.chi0 + self.chi1 * es.eps1.abs() + self.chi2 * es.eps2.abs()
    }
}

/// Surface exponent `q = δ + (1 − δ)·sign(|ε₂| − ε)`: 1 far from the
/// surface, `2δ − 1` near it, `δ` exactly at the threshold.
pub fn terminal_exponent(eps2: f64, delta: f64, eps_switch: f64) -> f64 {
    delta + (1.0 - delta) * sign(eps2.abs() - eps_switch)
}

/// `ψ_n = ε₁ + β·|ε₂|^q·sign(ε₂)`.
pub fn terminal_surface(es: &ErrorState, beta: f64, q: f64) -> f64 {
    es.eps1 + beta * es.eps2.abs().powf(q) * sign(es.eps2)
}

/// Exponentially decaying switching-gain multiplier `A(t) = B₁ + B₂·e^{−a·t}`.
pub fn switching_gain(t: f64, p: &FtsmcParams) -> f64 {
    p.b1 + p.b2 * (-p.a_decay * t).exp()
}

/// Terminal-layer command
/// `h_n = −(α₂ψ + A(t)α₁·s(ψ) + |ε₂|^{2−q}·s(ε₂)/(βq)) / K_m`, with `s` the
/// chosen switching function. `2 − q ∈ (0, 1]`, so the law stays finite as
/// `ε₂ → 0`.
pub fn ftsmc_control(es: &ErrorState, psi_n: f64, t: f64, p: &FtsmcParams, switching: Switching) -> f64 {
    let q = terminal_exponent(es.eps2, p.delta, p.eps_switch);
    let reaching = p.alpha2 * psi_n + switching_gain(t, p) * p.alpha1 * switching.apply(psi_n);
    let equivalent = es.eps2.abs().powf(2.0 - q) * switching.apply(es.eps2) / (p.beta * q);
    -(reaching + equivalent) / p.k_min
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponent_examples() {
        assert_relative_eq!(terminal_exponent(5.0, 1.2, 1.0), 1.0);
        assert_relative_eq!(terminal_exponent(-0.5, 1.2, 1.0), 1.4, epsilon = 1e-12);
        assert_relative_eq!(terminal_exponent(1.0, 1.2, 1.0), 1.2);
    }

    #[test]
    fn surface_examples() {
        assert_eq!(terminal_surface(&ErrorState::new(0.0, 0.0), 0.7, 1.4), 0.0);
        assert_eq!(terminal_surface(&ErrorState::new(1.0, 0.0), 0.7, 1.4), 1.0);
        for q in [1.0, 1.2, 1.4] {
            assert_eq!(terminal_surface(&ErrorState::new(-0.7, 1.0), 0.7, q), 0.0);
        }
    }

    #[test]
    fn switching_gain_examples() {
        let p = FtsmcParams { b1: 1.0, b2: 2.0, a_decay: 1.0, ..FtsmcParams::default() };
        assert_eq!(switching_gain(0.0, &p), 3.0);
        assert_relative_eq!(switching_gain(2.0f64.ln(), &p), 2.0, epsilon = 1e-12);
        assert_relative_eq!(switching_gain(1e3, &p), 1.0);
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let a = switching_gain(i as f64 * 0.1, &p);
            assert!(a < prev);
            prev = a;
        }
    }

    #[test]
    fn ftsmc_examples() {
        let p = FtsmcParams::default();
        let zero = ErrorState::default();
        assert_eq!(ftsmc_control(&zero, 0.0, 0.0, &p, Switching::Sign), 0.0);

        let es = ErrorState::new(1.0, 0.0);
        let h = ftsmc_control(&es, 1.0, 0.0, &p, Switching::Sign);
        let hand = -(1.0 / p.k_min) * (p.alpha2 + (p.b1 + p.b2) * p.alpha1);
        assert_relative_eq!(h, hand, epsilon = 1e-12);
    }

    #[test]
    fn validation() {
        FtsmcParams::default().validate().unwrap();
        for bad in [
            FtsmcParams { delta: 1.5, ..FtsmcParams::default() },
            FtsmcParams { eps_switch: 0.5, ..FtsmcParams::default() },
            FtsmcParams { b1: 0.9, ..FtsmcParams::default() },
            FtsmcParams { k_min: 2.0, ..FtsmcParams::default() },
            FtsmcParams { alpha1: 0.1, ..FtsmcParams::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
