//! Scenario execution: config resolution, artifact files, target checks.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use memsim_core::{BlochError, EchoError, FitError, PrepareError, PulseError, SequenceError, SpectralError};
use thiserror::Error;

use crate::config::{Config, ConfigError};
use crate::scenarios::{standard_scenarios, Scenario};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Prepare(#[from] PrepareError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Bloch(#[from] BlochError),
    #[error(transparent)]
    Echo(#[from] EchoError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write `{path}`: {reason}")]
    Io { path: String, reason: String },
}

/// What a scenario computed: headline values (checked against the
/// config's targets) and its artifact files.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub values: BTreeMap<String, f64>,
    pub data_csv: String,
    pub fit_report: String,
    pub extra_files: Vec<(String, String)>,
}

/// Per-target verdict plus the overall status of one scenario run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub passed: bool,
    pub target_lines: Vec<String>,
    pub out_dir: PathBuf,
}

pub struct Registry {
    scenarios: Vec<Scenario>,
}

impl Registry {
    pub fn standard() -> Self {
        Self {
            scenarios: standard_scenarios(),
        }
    }

    /// Registers an additional scenario; the listing stays alphabetized.
    pub fn register(&mut self, scenario: Scenario) {
        self.scenarios.push(scenario);
        self.scenarios.sort_by_key(|s| s.name);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.scenarios.iter().map(|s| s.name).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.name == name)
    }

    /// Stable, alphabetized listing with one-line descriptions.
    pub fn listing(&self) -> String {
        let width = self
            .scenarios
            .iter()
            .map(|s| s.name.len())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for s in &self.scenarios {
            out.push_str(&format!("{:width$}  {}\n", s.name, s.description));
        }
        out
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), ScenarioError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Runs one scenario: resolves its config with overrides, executes it,
/// writes `data.csv`, `fit.txt` and `summary.txt` under
/// `<out_root>/<name>/`, and reports whether all targets were met.
pub fn run_scenario(
    registry: &Registry,
    name: &str,
    overrides: &[String],
    out_root: &Path,
) -> Result<RunReport, ScenarioError> {
    let scenario = registry.get(name).ok_or_else(|| {
        ScenarioError::Failed(format!(
            "unknown scenario `{name}`; registered: {}",
            registry.names().join(", ")
        ))
    })?;
    let mut config = Config::parse(scenario.config_text)?;
    config.apply_overrides(overrides)?;

    let outcome = (scenario.run)(&config)?;

    let dir = out_root.join(scenario.name);
    fs::create_dir_all(&dir).map_err(|e| ScenarioError::Io {
        path: dir.display().to_string(),
        reason: e.to_string(),
    })?;

    let mut passed = true;
    let mut target_lines = Vec::new();
    for target in config.targets() {
        let line = match outcome.values.get(target.name()) {
            Some(&actual) => {
                let ok = target.check(actual);
                passed &= ok;
                format!(
                    "{} expected {} got {:.12e} {}",
                    target.name(),
                    target.describe(),
                    actual,
                    if ok { "pass" } else { "FAIL" }
                )
            }
            None => {
                passed = false;
                format!(
                    "{} expected {} but the scenario produced no such value FAIL",
                    target.name(),
                    target.describe()
                )
            }
        };
        target_lines.push(line);
    }

    let mut summary = format!("scenario={}\n", scenario.name);
    summary.push_str(&config.render());
    for (key, value) in &outcome.values {
        summary.push_str(&format!("result.{key}={value:.12e}\n"));
    }
    for line in &target_lines {
        summary.push_str(&format!("target.{line}\n"));
    }
    summary.push_str(&format!("status={}\n", if passed { "pass" } else { "fail" }));

    write_file(&dir, "data.csv", &outcome.data_csv)?;
    write_file(&dir, "fit.txt", &outcome.fit_report)?;
    write_file(&dir, "summary.txt", &summary)?;
    for (file_name, contents) in &outcome.extra_files {
        write_file(&dir, file_name, contents)?;
    }

    Ok(RunReport {
        scenario: scenario.name.to_string(),
        passed,
        target_lines,
        out_dir: dir,
    })
}

/// Runs every registered scenario; returns the individual reports.
pub fn check_all(registry: &Registry, out_root: &Path) -> Result<Vec<RunReport>, ScenarioError> {
    let mut reports = Vec::new();
    for name in registry.names() {
        reports.push(run_scenario(registry, name, &[], out_root)?);
    }
    Ok(reports)
}
