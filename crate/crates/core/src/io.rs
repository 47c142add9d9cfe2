//! Configuration parsing and trajectory/report serialization.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{SampleRecord, Trajectory};
use crate::error::{Error, Result};
use crate::params::{Grid, SolverConfig, SystemParams};
use crate::signal::InputSignal;

/// A complete run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemParams,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub signal: InputSignal,
}

impl Config {
    /// Validates every section, naming failures by their JSON path.
    pub fn validate(self) -> Result<Self> {
        let system = self.system.validate().map_err(|e| locate("system", e))?;
        let grid = self.grid.validate().map_err(|e| locate("grid", e))?;
        let solver = self.solver.validate().map_err(|e| locate("solver", e))?;
        self.signal.validate().map_err(|e| locate("signal", e))?;
        Ok(Config {
            system,
            grid,
            solver,
            signal: self.signal,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let text = value.to_string();
        parse_config(&text)
    }
}

fn json_key(field: &str) -> String {
    let mapped = match field {
        "spring_gain" => "K",
        "target" => "h1",
        "initial_position" => "h0",
        "initial_velocity" => "g0",
        _ => field,
    };
    match mapped.strip_prefix("initial_profile") {
        Some(rest) => format!("v0{rest}"),
        None => mapped.to_string(),
    }
}

fn locate(section: &str, e: Error) -> Error {
    match e {
        Error::Domain { field, reason } => {
            let key = json_key(&field);
            let field = if key == section || key.starts_with(&format!("{section}.")) {
                key
            } else {
                format!("{section}.{key}")
            };
            Error::Domain { field, reason }
        }
        other => other,
    }
}

fn deserialize<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        reason: e.inner().to_string(),
    })
}

/// Parses and validates a JSON run configuration.
pub fn parse_config(text: &str) -> Result<Config> {
    deserialize::<Config>(text)?.validate()
}

pub fn read_config(path: &Path) -> Result<Config> {
    parse_config(&read(path)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// CSV text of the sample records; floats use shortest round-trip formatting.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = SampleRecord::CSV_COLUMNS.join(",");
    out.push('\n');
    for s in &traj.samples {
        let row: Vec<String> = s.csv_values().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn write_trajectory(traj: &Trajectory, path: &Path) -> Result<()> {
    write(path, &trajectory_csv(traj))
}

/// Parses CSV text written by [`trajectory_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<SampleRecord>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != SampleRecord::CSV_COLUMNS.join(",") {
        return Err(Error::Parse {
            path: "header".into(),
            reason: format!("unexpected header `{header}`"),
        });
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != SampleRecord::CSV_COLUMNS.len() {
                return Err(Error::Parse {
                    path: format!("line {}", i + 2),
                    reason: format!("expected 15 fields, found {}", fields.len()),
                });
            }
            let mut values = [0.0; 15];
            for (k, (v, f)) in values.iter_mut().zip(&fields).enumerate() {
                *v = f.parse().map_err(|_| Error::Parse {
                    path: format!("line {}, column {}", i + 2, SampleRecord::CSV_COLUMNS[k]),
                    reason: format!("not a number: `{f}`"),
                })?;
            }
            Ok(SampleRecord::from_csv_values(values))
        })
        .collect()
}

pub fn read_trajectory(path: &Path) -> Result<Vec<SampleRecord>> {
    parse_trajectory_csv(&read(path)?)
}

/// Pretty-printed JSON with a trailing newline.
pub fn report_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_report<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    write(path, &report_json(report))
}

pub fn parse_report<T: DeserializeOwned>(text: &str) -> Result<T> {
    deserialize(text)
}

pub fn read_report<T: DeserializeOwned>(path: &Path) -> Result<T> {
    parse_report(&read(path)?)
}
