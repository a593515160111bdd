//! Scenario configuration: `key=value` text with `#` comments.
//!
//! Plain keys hold scenario inputs (unit suffixes allowed; see the core
//! units module). Keys of the form `expect.<name>=<target>:<tol>`
//! declare pass/fail targets for the scenario's output values: a `%`
//! suffix makes the tolerance relative, a bare number is absolute, and
//! `expect.<name>=<<bound>` asserts an upper bound.

use std::collections::BTreeMap;

use memsim_core::units;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("missing configuration key `{0}`")]
    MissingKey(String),
    #[error("key `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("override `{0}` is not key=value")]
    BadOverride(String),
    #[error("override names unknown key `{0}`")]
    UnknownOverride(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

/// One expected output value with its acceptance tolerance.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Within {
        name: String,
        value: f64,
        tolerance: Tolerance,
    },
    AtMost {
        name: String,
        bound: f64,
    },
}

impl Target {
    pub fn name(&self) -> &str {
        match self {
            Target::Within { name, .. } | Target::AtMost { name, .. } => name,
        }
    }

    pub fn check(&self, actual: f64) -> bool {
        match self {
            Target::Within {
                value, tolerance, ..
            } => {
                let allowed = match tolerance {
                    Tolerance::Relative(r) => r * value.abs(),
                    Tolerance::Absolute(a) => *a,
                };
                (actual - value).abs() <= allowed
            }
            Target::AtMost { bound, .. } => actual <= *bound,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Target::Within {
                value, tolerance, ..
            } => match tolerance {
                Tolerance::Relative(r) => format!("{value} within {}%", r * 100.0),
                Tolerance::Absolute(a) => format!("{value} within {a}"),
            },
            Target::AtMost { bound, .. } => format!("at most {bound}"),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    targets: Vec<Target>,
}

fn parse_target(name: &str, raw: &str) -> Result<Target, ConfigError> {
    let bad = |reason: &str| ConfigError::BadValue {
        key: format!("expect.{name}"),
        reason: reason.into(),
    };
    if let Some(bound) = raw.strip_prefix('<') {
        let bound: f64 = bound.trim().parse().map_err(|_| bad("unparsable bound"))?;
        return Ok(Target::AtMost {
            name: name.to_string(),
            bound,
        });
    }
    let (value, tol) = raw
        .split_once(':')
        .ok_or_else(|| bad("expected <target>:<tolerance>"))?;
    let value: f64 = value.trim().parse().map_err(|_| bad("unparsable target"))?;
    let tolerance = if let Some(percent) = tol.trim().strip_suffix('%') {
        Tolerance::Relative(
            percent
                .trim()
                .parse::<f64>()
                .map_err(|_| bad("unparsable tolerance"))?
                / 100.0,
        )
    } else {
        Tolerance::Absolute(tol.trim().parse().map_err(|_| bad("unparsable tolerance"))?)
    };
    Ok(Target::Within {
        name: name.to_string(),
        value,
        tolerance,
    })
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        let mut targets = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Malformed {
                line: idx + 1,
                text: line.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if let Some(name) = key.strip_prefix("expect.") {
                targets.push(parse_target(name, value)?);
            } else {
                values.insert(key.to_string(), value.to_string());
            }
        }
        Ok(Self { values, targets })
    }

    /// Applies `--set key=value` overrides. Overriding an unknown key is
    /// an error, so typos are caught instead of silently ignored.
    pub fn apply_overrides(&mut self, overrides: &[String]) -> Result<(), ConfigError> {
        for item in overrides {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| ConfigError::BadOverride(item.clone()))?;
            let key = key.trim();
            if let Some(name) = key.strip_prefix("expect.") {
                let target = parse_target(name, value.trim())?;
                if let Some(existing) = self.targets.iter_mut().find(|t| t.name() == name) {
                    *existing = target;
                } else {
                    self.targets.push(target);
                }
            } else {
                if !self.values.contains_key(key) {
                    return Err(ConfigError::UnknownOverride(key.to_string()));
                }
                self.values.insert(key.to_string(), value.trim().to_string());
            }
        }
        Ok(())
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn raw(&self, key: &str) -> Result<&str, ConfigError> {
        self.values
            .get(key)
            .map(|s| s.as_str())
            .ok_or_else(|| ConfigError::MissingKey(key.to_string()))
    }

    fn unit(&self, key: &str, kind: units::UnitKind) -> Result<f64, ConfigError> {
        units::parse(self.raw(key)?, kind).map_err(|e| ConfigError::BadValue {
            key: key.to_string(),
            reason: e.to_string(),
        })
    }

    pub fn time(&self, key: &str) -> Result<f64, ConfigError> {
        self.unit(key, units::UnitKind::Time)
    }

    pub fn frequency(&self, key: &str) -> Result<f64, ConfigError> {
        self.unit(key, units::UnitKind::Frequency)
    }

    pub fn angle(&self, key: &str) -> Result<f64, ConfigError> {
        self.unit(key, units::UnitKind::Angle)
    }

    pub fn number(&self, key: &str) -> Result<f64, ConfigError> {
        self.unit(key, units::UnitKind::Bare)
    }

    pub fn integer(&self, key: &str) -> Result<u64, ConfigError> {
        self.raw(key)?
            .parse()
            .map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                reason: "expected an integer".into(),
            })
    }

    /// Stable `key=value` rendering of the resolved inputs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.values {
            out.push_str(&format!("{key}={value}\n"));
        }
        out
    }
}
