use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use shared_follow::config::{CompareConfig, RunConfigFile};
use shared_follow::driver_state::{reaction_time_trace, read_landmarks_file, FuzzyRuleBase, LandmarkLayout};
use shared_follow::sim::{batch_compare, evaluate, RunOutcome, Trace, TRACE_HEADER};
use shared_follow::Error;

#[derive(Parser)]
#[command(name = "shared-follow", version, about = "Shared-authority car-following simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario; writes trace.csv and summary.json into --out.
    ///
    /// Exit status: 0 ok, 1 configuration or run error, 2 collision.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-frame facial features and reaction time from a landmark CSV.
    Features {
        landmarks: PathBuf,
        /// Rule-base TOML; the built-in rule base when omitted.
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Frames averaged before inference. 1 scores each frame on its own.
        #[arg(long, default_value_t = 1)]
        window: usize,
    },
    /// Run every [[runs]] entry of a comparison file; writes one trace per
    /// run and comparison.csv into --out.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract a `t,<column>` series from a trace CSV.
    Plotdata {
        trace: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::Features { landmarks, rules, out, window } => features(&landmarks, rules.as_deref(), &out, window),
        Command::Compare { config, out } => compare(&config, &out),
        Command::Plotdata { trace, column, out } => plotdata(&trace, &column, &out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn simulate(config: &Path, out: &Path) -> Result<ExitCode, Error> {
    let file = RunConfigFile::load(config)?;
    let run = evaluate(&file.scenario)?;
    fs::create_dir_all(out)?;
    run.trace.write_file(&out.join("trace.csv"))?;
    let summary = summary(&file.scenario.name, &run);
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary).map_err(io_err)? + "\n")?;
    match run.metrics.collision_time {
        Some(t) => {
            eprintln!("collision at t = {t} s");
            Ok(ExitCode::from(2))
        }
        None => Ok(ExitCode::SUCCESS),
    }
}

fn summary(name: &str, run: &RunOutcome) -> serde_json::Value {
    json!({
        "name": name,
        "rows": run.trace.rows.len(),
        "collision": run.metrics.collision_time.is_some(),
        "metrics": run.metrics,
        "mean_settling_time": run.metrics.mean_settling(),
    })
}

fn features(landmarks: &Path, rules: Option<&Path>, out: &Path, window: usize) -> Result<ExitCode, Error> {
    let rb = match rules {
        Some(p) => FuzzyRuleBase::load(p)?,
        None => FuzzyRuleBase::default(),
    };
    let frames = read_landmarks_file(landmarks).map_err(|e| match e {
        Error::Parse { line, message } => Error::Config(format!("{}: line {line}: {message}", landmarks.display())),
        other => other,
    })?;
    let samples = reaction_time_trace(&frames, &rb, &LandmarkLayout::default(), window)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["frame", "efv", "mfv", "entropy", "R"]).map_err(io_err)?;
    for s in &samples {
        let f = s.features;
        w.write_record([
            s.frame.to_string(),
            f.efv.to_string(),
            f.mfv.to_string(),
            f.entropy.to_string(),
            s.reaction_time.to_string(),
        ])
        .map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(io_err)?;
    write_with_parent(out, &bytes)?;
    Ok(ExitCode::SUCCESS)
}

const COMPARISON_HEADER: [&str; 11] = [
    "name",
    "status",
    "collision_time",
    "min_gap",
    "max_speed_error",
    "max_accel_error",
    "jerk_std",
    "mean_settling_time",
    "settling_times",
    "stabilization_ratio",
    "error",
];

fn compare(config: &Path, out: &Path) -> Result<ExitCode, Error> {
    let cfg = CompareConfig::load(config)?;
    let rows = batch_compare(&cfg.runs, cfg.baseline);
    fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COMPARISON_HEADER).map_err(io_err)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut any_ok = false;
    for row in &rows {
        match &row.outcome {
            Ok(run) => {
                any_ok = true;
                run.trace.write_file(&out.join(format!("{}.csv", row.name)))?;
                let m = &run.metrics;
                let settling: Vec<String> = m
                    .settling
                    .iter()
                    .map(|s| format!("{}:{}", s.event, s.settling_time.map_or("NA".into(), |t| t.to_string())))
                    .collect();
                let status = if m.collision_time.is_some() { "collision" } else { "ok" };
                w.write_record([
                    row.name.clone(),
                    status.into(),
                    opt(m.collision_time),
                    m.min_gap.to_string(),
                    m.max_speed_error.to_string(),
                    m.max_accel_error.to_string(),
                    m.jerk_std.to_string(),
                    opt(m.mean_settling()),
                    settling.join(";"),
                    opt(row.ratio),
                    String::new(),
                ])
                .map_err(io_err)?;
            }
            Err(e) => {
                eprintln!("run `{}` failed: {e}", row.name);
                let mut rec = vec![row.name.clone(), "failed".into()];
                rec.resize(COMPARISON_HEADER.len() - 1, String::new());
                rec.push(e.to_string());
                w.write_record(&rec).map_err(io_err)?;
            }
        }
    }
    fs::write(out.join("comparison.csv"), w.into_inner().map_err(io_err)?)?;
    Ok(if any_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn plotdata(trace: &Path, column: &str, out: &Path) -> Result<ExitCode, Error> {
    let Some(idx) = Trace::column_index(column) else {
        return Err(Error::Config(format!(
            "unknown column `{column}`; valid columns: {}",
            TRACE_HEADER.join(", ")
        )));
    };
    let tr = Trace::read_file(trace)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", column]).map_err(io_err)?;
    for row in &tr.rows {
        let v = row.values()[idx];
        let v = if column == "clamped" { format!("{}", v as u8) } else { v.to_string() };
        w.write_record([row.t.to_string(), v]).map_err(io_err)?;
    }
    write_with_parent(out, &w.into_inner().map_err(io_err)?)?;
    Ok(ExitCode::SUCCESS)
}

fn write_with_parent(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, bytes)?;
    Ok(())
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}
