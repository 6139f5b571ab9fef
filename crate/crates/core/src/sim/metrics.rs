//! Scalar summaries of a trace.

use serde::{Deserialize, Serialize};

use super::trace::Trace;
use crate::error::{Error, Result};

/// Tolerance band on `|ε₁|` used to decide that the gap has settled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SettlingBand {
    /// Fixed band in metres.
    Absolute { meters: f64 },
    /// Fraction of the largest `|ε₁|` between the event and the next one.
    RelativeToPeak { fraction: f64 },
}

impl Default for SettlingBand {
    fn default() -> Self {
        SettlingBand::RelativeToPeak { fraction: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    /// Disturbance times, s.
    pub events: Vec<f64>,
    pub band: SettlingBand,
    /// How long `|ε₁|` must stay inside the band, s.
    pub dwell: f64,
    /// Half-width of the windows around leader breakpoints that the
    /// acceleration-error metric skips, s.
    pub exclusion: f64,
    /// `[start, end]` of the window used for jerk statistics, s.
    pub steady_window: [f64; 2],
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            events: vec![20.0, 36.0, 60.0, 76.0],
            band: SettlingBand::default(),
            dwell: 2.0,
            exclusion: 1.0,
            steady_window: [48.0, 58.0],
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<()> {
        let band_ok = match self.band {
            SettlingBand::Absolute { meters } => meters > 0.0 && meters.is_finite(),
            SettlingBand::RelativeToPeak { fraction } => fraction > 0.0 && fraction < 1.0,
        };
        let ok = band_ok
            && self.dwell > 0.0
            && self.dwell.is_finite()
            && self.exclusion >= 0.0
            && self.steady_window[0] < self.steady_window[1]
            && self.events.iter().all(|e| e.is_finite())
            && self.events.windows(2).all(|w| w[0] < w[1]);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid metrics settings: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventSettling {
    pub event: f64,
    /// Largest `|ε₁|` in the event's window, m.
    pub peak: f64,
    /// Band actually applied, m.
    pub band: f64,
    /// Time from the event until `|ε₁|` settles, s; `None` if it never does.
    pub settling_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub min_gap: f64,
    pub collision_time: Option<f64>,
    pub settling: Vec<EventSettling>,
    /// Largest `|v_lead − v_follow|`, m/s.
    pub max_speed_error: f64,
    /// Largest `|a_combined − a_lead|` outside the breakpoint windows, m/s².
    pub max_accel_error: f64,
    /// Standard deviation of the follower jerk over the steady window, m/s³.
    pub jerk_std: f64,
}

impl Metrics {
    /// Mean settling time over events that settled.
    pub fn mean_settling(&self) -> Option<f64> {
        let settled: Vec<f64> = self.settling.iter().filter_map(|s| s.settling_time).collect();
        (!settled.is_empty()).then(|| settled.iter().sum::<f64>() / settled.len() as f64)
    }
}

/// First `τ >= event` such that `|ε₁| <= band` on every logged row in
/// `[τ, τ + dwell]`, reported as `τ − event`. The dwell window must fit
/// inside the trace.
pub fn settling_time(times: &[f64], eps1: &[f64], event: f64, band: f64, dwell: f64) -> Option<f64> {
    const SLACK: f64 = 1e-9;
    let t_end = *times.last()?;
    let start = times.partition_point(|&t| t < event - SLACK);
    // Scan backwards so each candidate knows how long the in-band run
    // starting at it lasts.
    let mut run_end: Option<f64> = None;
    let mut best = None;
    for i in (start..times.len()).rev() {
        if eps1[i].abs() <= band {
            let end = *run_end.get_or_insert(times[i]);
            let covers = if end >= t_end - SLACK {
                times[i] + dwell <= t_end + SLACK
            } else {
                end - times[i] >= dwell - SLACK
            };
            if covers {
                best = Some(times[i]);
            }
        } else {
            run_end = None;
        }
    }
    best.map(|tau| (tau - event).max(0.0))
}

/// Scalar metrics of `tr`. `breakpoints` are the leader's acceleration
/// discontinuities; the leader's acceleration is reconstructed from the
/// logged `v_lead` by forward differences.
pub fn compute_metrics(tr: &Trace, cfg: &MetricsConfig, breakpoints: &[f64]) -> Result<Metrics> {
    cfg.validate()?;
    let rows = &tr.rows;
    if rows.is_empty() {
        return Err(Error::InvalidParameter("trace has no rows".into()));
    }
    let times = tr.times();
    let eps1: Vec<f64> = rows.iter().map(|r| r.eps1).collect();

    let mut settling = Vec::with_capacity(cfg.events.len());
    for (k, &event) in cfg.events.iter().enumerate() {
        let until = cfg.events.get(k + 1).copied().unwrap_or(f64::INFINITY);
        let peak = rows
            .iter()
            .filter(|r| r.t >= event && r.t < until)
            .map(|r| r.eps1.abs())
            .fold(0.0, f64::max);
        let band = match cfg.band {
            SettlingBand::Absolute { meters } => meters,
            SettlingBand::RelativeToPeak { fraction } => fraction * peak,
        };
        settling.push(EventSettling {
            event,
            peak,
            band,
            settling_time: settling_time(&times, &eps1, event, band, cfg.dwell),
        });
    }

    let near_break = |t: f64| breakpoints.iter().any(|b| (t - b).abs() < cfg.exclusion);
    let mut max_accel_error: f64 = 0.0;
    for w in rows.windows(2) {
        if w[0].gap <= 0.0 || w[1].gap <= 0.0 || near_break(w[0].t) || near_break(w[1].t) {
            continue;
        }
        let a_lead = (w[1].v_lead - w[0].v_lead) / (w[1].t - w[0].t);
        max_accel_error = max_accel_error.max((w[0].a_combined - a_lead).abs());
    }

    let [s0, s1] = cfg.steady_window;
    let steady: Vec<_> = rows.iter().filter(|r| r.t >= s0 && r.t <= s1).collect();
    let jerks: Vec<f64> = steady
        .windows(2)
        .map(|w| (w[1].a_combined - w[0].a_combined) / (w[1].t - w[0].t))
        .collect();

    Ok(Metrics {
        min_gap: rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min),
        collision_time: tr.collision_time,
        settling,
        max_speed_error: rows.iter().map(|r| (r.v_lead - r.v_follow).abs()).fold(0.0, f64::max),
        max_accel_error,
        jerk_std: std_dev(&jerks),
    })
}

/// Population standard deviation; 0 for fewer than two samples.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `Σ settling(candidate) / Σ settling(baseline)` over events where both
/// settled. `None` if there is no such event or the baseline sum is zero.
pub fn stabilization_ratio(candidate: &Metrics, baseline: &Metrics) -> Option<f64> {
    let (mut num, mut den, mut n) = (0.0, 0.0, 0);
    for (c, b) in candidate.settling.iter().zip(&baseline.settling) {
        if let (Some(tc), Some(tb)) = (c.settling_time, b.settling_time) {
            num += tc;
            den += tb;
            n += 1;
        }
    }
    (n > 0 && den > 0.0).then(|| num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::trace::TraceRow;
    use approx::assert_relative_eq;

    fn trace_from(f: impl Fn(f64) -> TraceRow, n: usize, dt: f64) -> Trace {
        Trace {
            rows: (0..n)
                .map(|i| {
                    let t = i as f64 * dt;
                    TraceRow { t, ..f(t) }
                })
                .collect(),
            collision_time: None,
        }
    }

    #[test]
    fn zero_error_settles_immediately() {
        let tr = trace_from(|_| TraceRow { gap: 10.0, ..TraceRow::default() }, 1001, 0.1);
        let m = compute_metrics(&tr, &MetricsConfig::default(), &[]).unwrap();
        for s in &m.settling {
            assert_eq!(s.settling_time, Some(0.0));
        }
        assert_eq!(m.jerk_std, 0.0);
    }

    #[test]
    fn exponential_decay_settles_at_ln_20() {
        let dt = 0.001;
        let tr = trace_from(|t| TraceRow { eps1: (-t).exp(), gap: 1.0, ..TraceRow::default() }, 10_001, dt);
        let cfg = MetricsConfig {
            events: vec![0.0],
            band: SettlingBand::Absolute { meters: 0.05 },
            dwell: 1.0,
            ..MetricsConfig::default()
        };
        let m = compute_metrics(&tr, &cfg, &[]).unwrap();
        let ts = m.settling[0].settling_time.unwrap();
        assert!((ts - 20f64.ln()).abs() <= dt, "{ts}");
    }

    #[test]
    fn excursion_inside_dwell_restarts_the_clock() {
        let dt = 0.1;
        let tr = trace_from(
            |t| TraceRow { eps1: if (3.0..3.5).contains(&t) { 1.0 } else { 0.0 }, gap: 1.0, ..TraceRow::default() },
            101,
            dt,
        );
        let times = tr.times();
        let eps1 = tr.column("eps1").unwrap();
        let ts = settling_time(&times, &eps1, 2.0, 0.1, 2.0).unwrap();
        assert_relative_eq!(ts, 1.5, epsilon = 1e-9);
        assert_eq!(settling_time(&times, &eps1, 0.0, 0.1, 2.0), Some(0.0));
        assert_eq!(settling_time(&times, &vec![1.0; 101], 0.0, 0.1, 2.0), None);
        // Dwell window longer than what is left of the trace.
        assert_eq!(settling_time(&times, &eps1, 9.0, 0.1, 2.0), None);
    }

    #[test]
    fn constant_accel_has_no_jerk() {
        let tr = trace_from(|_| TraceRow { a_combined: 1.3, gap: 5.0, ..TraceRow::default() }, 1001, 0.1);
        assert_eq!(compute_metrics(&tr, &MetricsConfig::default(), &[]).unwrap().jerk_std, 0.0);
    }

    #[test]
    fn accel_error_skips_breakpoints() {
        // Follower matches a 1 m/s² leader ramp that ends at t = 5, apart
        // from a spike right at the breakpoint.
        let tr = trace_from(
            |t| TraceRow {
                v_lead: t.min(5.0),
                a_combined: if (t - 5.0).abs() < 1e-9 { 10.0 } else if t < 5.0 { 1.0 } else { 0.0 },
                gap: 5.0,
                ..TraceRow::default()
            },
            101,
            0.1,
        );
        let cfg = MetricsConfig { exclusion: 1.0, ..MetricsConfig::default() };
        assert!(compute_metrics(&tr, &cfg, &[5.0]).unwrap().max_accel_error < 1e-9);
        let cfg = MetricsConfig { exclusion: 0.0, ..cfg };
        assert!(compute_metrics(&tr, &cfg, &[5.0]).unwrap().max_accel_error > 9.0);
    }

    #[test]
    fn ratio_uses_common_events() {
        let mk = |ts: &[Option<f64>]| Metrics {
            min_gap: 1.0,
            collision_time: None,
            settling: ts
                .iter()
                .map(|&s| EventSettling { event: 0.0, peak: 1.0, band: 0.05, settling_time: s })
                .collect(),
            max_speed_error: 0.0,
            max_accel_error: 0.0,
            jerk_std: 0.0,
        };
        let a = mk(&[Some(1.0), Some(2.0), None]);
        let b = mk(&[Some(2.0), Some(4.0), Some(1.0)]);
        assert_eq!(stabilization_ratio(&a, &b), Some(0.5));
        assert_eq!(stabilization_ratio(&a, &mk(&[None, None, None])), None);
        assert_eq!(a.mean_settling(), Some(1.5));
    }
}
