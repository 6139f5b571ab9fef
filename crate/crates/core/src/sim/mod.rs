//! Closed-loop simulation, logging and scoring.

pub mod batch;
pub mod engine;
pub mod lead;
pub mod metrics;
pub mod scenario;
pub mod trace;

pub use batch::{batch_compare, evaluate, BatchRow, RunOutcome};
pub use engine::{run_scenario, run_with_schedule};
pub use lead::LeadProfile;
pub use metrics::{
    compute_metrics, settling_time, stabilization_ratio, std_dev, EventSettling, Metrics, MetricsConfig,
    SettlingBand,
};
pub use scenario::{
    ActuatorLimits, ControllerKind, DriverSource, GapReference, ReactionSchedule, ScenarioConfig,
};
pub use trace::{detect_collision, Trace, TraceRow, TRACE_HEADER};
