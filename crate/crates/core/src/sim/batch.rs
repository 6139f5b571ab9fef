//! Several scenarios side by side.

use rayon::prelude::*;

use super::engine::run_scenario;
use super::metrics::{compute_metrics, stabilization_ratio, Metrics};
use super::scenario::ScenarioConfig;
use super::trace::Trace;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace: Trace,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchRow {
    pub name: String,
    pub outcome: Result<RunOutcome>,
    /// Stabilization-time ratio against the baseline run, when both settle.
    pub ratio: Option<f64>,
}

/// Runs and scores one scenario.
pub fn evaluate(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    let trace = run_scenario(cfg)?;
    let metrics = compute_metrics(&trace, &cfg.metrics, &cfg.breakpoints())?;
    Ok(RunOutcome { trace, metrics })
}

/// Runs every config (in parallel), keeping input order. A failed run is
/// reported in its row and does not stop the others. Ratios are computed
/// against `cfgs[baseline]` when given; the baseline's own ratio is 1 if it
/// settles at all.
pub fn batch_compare(cfgs: &[ScenarioConfig], baseline: Option<usize>) -> Vec<BatchRow> {
    let outcomes: Vec<Result<RunOutcome>> = cfgs.par_iter().map(evaluate).collect();
    let base = baseline.and_then(|b| outcomes.get(b)).and_then(|o| o.as_ref().ok());
    let ratios: Vec<Option<f64>> = outcomes
        .iter()
        .map(|o| match (o, base) {
            (Ok(run), Some(b)) => stabilization_ratio(&run.metrics, &b.metrics),
            _ => None,
        })
        .collect();
    cfgs.iter()
        .zip(outcomes)
        .zip(ratios)
        .map(|((cfg, outcome), ratio)| BatchRow { name: cfg.name.clone(), outcome, ratio })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn single_config_has_no_ratio() {
        let cfg = ScenarioConfig { duration: 10.0, ..ScenarioConfig::default() };
        let rows = batch_compare(&[cfg], None);
        assert_eq!(rows.len(), 1);
        assert!(rows[0].outcome.is_ok());
        assert_eq!(rows[0].ratio, None);
    }

    #[test]
    fn duplicates_are_identical_and_errors_are_kept() {
        let good = ScenarioConfig { duration: 10.0, ..ScenarioConfig::default() };
        let bad = ScenarioConfig { duration: -1.0, name: "bad".into(), ..ScenarioConfig::default() };
        let rows = batch_compare(&[good.clone(), bad, good], Some(0));
        assert_eq!(rows[0].outcome, rows[2].outcome);
        assert!(matches!(rows[1].outcome, Err(Error::Config(_))));
        assert_eq!(rows[1].name, "bad");
    }
}
