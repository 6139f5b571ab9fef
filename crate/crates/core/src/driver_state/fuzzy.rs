//! Gaussian-antecedent fuzzy inference from facial features to a crisp
//! reaction time, using singleton consequents and weighted-average
//! (centroid) defuzzification.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::FacialFeatures;
use crate::error::{Error, Result};

/// `exp(-(x - c)² / (2σ²))`.
pub fn gaussian_membership(x: f64, c: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("membership width must be > 0, got {sigma}")));
    }
    Ok(log_membership(x, c, sigma).exp())
}

fn log_membership(x: f64, c: f64, sigma: f64) -> f64 {
    let d = x - c;
    -(d * d) / (2.0 * sigma * sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gaussian {
    pub c: f64,
    pub sigma: f64,
}

impl Gaussian {
    pub const fn new(c: f64, sigma: f64) -> Self {
        Self { c, sigma }
    }

    pub fn membership(&self, x: f64) -> f64 {
        log_membership(x, self.c, self.sigma).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyRule {
    pub efv: Gaussian,
    pub mfv: Gaussian,
    pub entropy: Gaussian,
    /// Crisp reaction time this rule votes for, s.
    pub reaction_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TNorm {
    #[default]
    Product,
    Minimum,
}

impl FuzzyRule {
    fn log_activation(&self, ft: &FacialFeatures, tnorm: TNorm) -> f64 {
        let terms = [
            log_membership(ft.efv, self.efv.c, self.efv.sigma),
            log_membership(ft.mfv, self.mfv.c, self.mfv.sigma),
            log_membership(ft.entropy, self.entropy.c, self.entropy.sigma),
        ];
        match tnorm {
            TNorm::Product => terms.iter().sum(),
            TNorm::Minimum => terms.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    fn validate(&self, idx: usize) -> Result<()> {
        for (name, g) in [("efv", self.efv), ("mfv", self.mfv), ("entropy", self.entropy)] {
            if !(g.sigma > 0.0) || !g.sigma.is_finite() || !g.c.is_finite() {
                return Err(Error::Config(format!(
                    "rule {idx}: {name} antecedent needs finite centre and sigma > 0"
                )));
            }
        }
        if !self.reaction_time.is_finite() || self.reaction_time < 0.0 {
            return Err(Error::Config(format!("rule {idx}: reaction time must be finite and >= 0")));
        }
        Ok(())
    }
}

/// Activation strength of a rule under the product t-norm.
pub fn rule_activation(ft: &FacialFeatures, rule: &FuzzyRule) -> f64 {
    rule.log_activation(ft, TNorm::Product).exp()
}

/// Weighted average of rule consequents. Activations are normalised in the
/// log domain, so inputs far from every centre still produce a finite,
/// well-defined answer.
pub fn defuzzify(ft: &FacialFeatures, rules: &[FuzzyRule], tnorm: TNorm) -> Result<f64> {
    if rules.is_empty() {
        return Err(Error::Config("rule base is empty".into()));
    }
    let logs: Vec<f64> = rules.iter().map(|r| r.log_activation(ft, tnorm)).collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::InvalidParameter("features must be finite".into()));
    }
    let (num, den) = rules.iter().zip(&logs).fold((0.0, 0.0), |(num, den), (r, l)| {
        let w = (l - peak).exp();
        (num + w * r.reaction_time, den + w)
    });
    let (lo, hi) = rules.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
        (lo.min(r.reaction_time), hi.max(r.reaction_time))
    });
    Ok((num / den).clamp(lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyRuleBase {
    #[serde(default)]
    pub tnorm: TNorm,
    pub rules: Vec<FuzzyRule>,
}

impl FuzzyRuleBase {
    pub const RULE_COUNT: usize = 16;

    pub fn new(rules: Vec<FuzzyRule>, tnorm: TNorm) -> Result<Self> {
        let rb = Self { tnorm, rules };
        rb.validate()?;
        Ok(rb)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rules.len() != Self::RULE_COUNT {
            return Err(Error::Config(format!(
                "rule base needs exactly {} rules, found {}",
                Self::RULE_COUNT,
                self.rules.len()
            )));
        }
        for (i, r) in self.rules.iter().enumerate() {
            r.validate(i)?;
        }
        Ok(())
    }

    pub fn consequent_range(&self) -> (f64, f64) {
        self.rules.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.reaction_time), hi.max(r.reaction_time))
        })
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let rb: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        rb.validate()?;
        Ok(rb)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }
}

/// Eye-opening partition, from nearly closed to wide open.
const EFV_SETS: [Gaussian; 4] = [
    Gaussian::new(0.10, 0.04),
    Gaussian::new(0.18, 0.04),
    Gaussian::new(0.26, 0.04),
    Gaussian::new(0.34, 0.04),
];
/// Mouth: closed, yawning.
const MFV_SETS: [Gaussian; 2] = [Gaussian::new(0.15, 0.20), Gaussian::new(0.75, 0.20)];
/// Landmark-motion entropy: calm, restless.
const ENTROPY_SETS: [Gaussian; 2] = [Gaussian::new(1.0, 0.35), Gaussian::new(1.9, 0.35)];

const R_FLOOR: f64 = 0.1;
const R_CEILING: f64 = 2.0;

impl Default for FuzzyRuleBase {
    /// 4 × 2 × 2 grid. Consequents grow as the eye closes, the mouth opens and
    /// the landmark motion gets more irregular, spanning 0.1 s to 2.0 s.
    fn default() -> Self {
        let mut rules = Vec::with_capacity(Self::RULE_COUNT);
        for (ei, efv) in EFV_SETS.iter().enumerate() {
            for (mi, mfv) in MFV_SETS.iter().enumerate() {
                for (hi, entropy) in ENTROPY_SETS.iter().enumerate() {
                    let eye_closure = (EFV_SETS.len() - 1 - ei) as f64 / (EFV_SETS.len() - 1) as f64;
                    let fatigue = 0.6 * eye_closure + 0.25 * mi as f64 + 0.15 * hi as f64;
                    rules.push(FuzzyRule {
                        efv: *efv,
                        mfv: *mfv,
                        entropy: *entropy,
                        reaction_time: R_FLOOR + (R_CEILING - R_FLOOR) * fatigue,
                    });
                }
            }
        }
        Self { tnorm: TNorm::Product, rules }
    }
}

/// Reaction time inferred by the rule base.
pub fn infer_reaction_time(ft: &FacialFeatures, rb: &FuzzyRuleBase) -> Result<f64> {
    defuzzify(ft, &rb.rules, rb.tnorm)
}
