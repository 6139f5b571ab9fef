//! On-disk run and comparison files (TOML).
//!
//! A run file holds one scenario:
//!
//! ```toml
//! schema_version = 1
//! [scenario]
//! name = "weaving"
//! controller = "a_ftsmc"
//! [scenario.driver]
//! kind = "constant"
//! reaction_time = 1.2
//! ```
//!
//! A comparison file holds a shared `[base]` scenario and a list of
//! `[[runs]]`, each a partial scenario deep-merged over the base. Tables
//! merge key by key, except that a table whose `kind` differs from the
//! base's replaces it whole. `baseline` names the run that stabilization
//! ratios are computed against.
//!
//! Relative `path`/`rules` entries of a landmark driver are resolved
//! against the directory of the file that names them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{DriverSource, ScenarioConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub schema_version: u32,
    #[serde(default)]
    pub scenario: ScenarioConfig,
}

impl RunConfigFile {
    pub fn new(scenario: ScenarioConfig) -> Self {
        Self { schema_version: SCHEMA_VERSION, scenario }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let file: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        check_version(file.schema_version)?;
        Ok(file)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads, parses and validates a run file; relative landmark paths are
    /// made relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let mut file = Self::from_toml_str(&text).map_err(|e| in_file(path, e))?;
        resolve_paths(&mut file.scenario, parent(path));
        file.scenario.validate().map_err(|e| in_file(path, e))?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml_string()?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompareFile {
    schema_version: u32,
    #[serde(default)]
    baseline: Option<String>,
    #[serde(default = "empty_table")]
    base: toml::Table,
    #[serde(default)]
    runs: Vec<toml::Table>,
}

fn empty_table() -> toml::Table {
    toml::Table::new()
}

/// A parsed comparison file: fully merged scenarios plus the index of the
/// baseline run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub runs: Vec<ScenarioConfig>,
    pub baseline: Option<usize>,
}

impl CompareConfig {
    /// Parses without validating the individual scenarios; a bad run is
    /// reported by the batch, not here. Run names must be unique since
    /// they name output files.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let raw: RawCompareFile = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        check_version(raw.schema_version)?;
        if raw.runs.is_empty() {
            return Err(Error::Config("comparison file has no [[runs]]".into()));
        }
        let mut runs = Vec::with_capacity(raw.runs.len());
        for (i, over) in raw.runs.into_iter().enumerate() {
            let mut merged = raw.base.clone();
            merge(&mut merged, over);
            let mut cfg: ScenarioConfig = toml::Value::Table(merged)
                .try_into()
                .map_err(|e: toml::de::Error| Error::Config(format!("run {}: {e}", i + 1)))?;
            if cfg.name == ScenarioConfig::default().name {
                cfg.name = format!("run{}", i + 1);
            }
            runs.push(cfg);
        }
        for (i, cfg) in runs.iter().enumerate() {
            if runs[..i].iter().any(|c| c.name == cfg.name) {
                return Err(Error::Config(format!("duplicate run name `{}`", cfg.name)));
            }
            if !is_safe_name(&cfg.name) {
                return Err(Error::Config(format!(
                    "run name `{}` may only contain letters, digits, `-`, `_` and `.`",
                    cfg.name
                )));
            }
        }
        let baseline = match raw.baseline {
            None => None,
            Some(name) => Some(
                runs.iter()
                    .position(|c| c.name == name)
                    .ok_or_else(|| Error::Config(format!("baseline `{name}` is not one of the runs")))?,
            ),
        };
        Ok(Self { runs, baseline })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let mut cfg = Self::from_toml_str(&text).map_err(|e| in_file(path, e))?;
        for run in &mut cfg.runs {
            resolve_paths(run, parent(path));
        }
        Ok(cfg)
    }
}

fn check_version(v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Config(format!("unsupported schema_version {v} (expected {SCHEMA_VERSION})")))
    }
}

fn is_safe_name(name: &str) -> bool {
    !name.is_empty()
        && !name.starts_with('.')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// Recursive table merge. Scalars and arrays in `over` replace; a table
/// with a different `kind` tag replaces the base table wholesale.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if b.get("kind") == o.get("kind") || o.get("kind").is_none() => {
                merge(b, o)
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

fn resolve_paths(cfg: &mut ScenarioConfig, dir: &Path) {
    if let DriverSource::Landmarks { path, rules, .. } = &mut cfg.driver {
        *path = join(dir, path);
        if let Some(r) = rules {
            *r = join(dir, r);
        }
    }
}

fn join(dir: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}

fn parent(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new(""))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    }
}
