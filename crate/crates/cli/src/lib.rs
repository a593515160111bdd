//! Scenario runner for the rare-earth-ion memory simulator.
//!
//! Wires the preparation, pulse, echo and analysis machinery of
//! `memsim-core` into named, reproducible pipelines. Each scenario ships
//! its configuration (inputs plus expected targets) as a versioned text
//! file; running one writes plot-ready CSV data, a fit report and a
//! pass/fail summary.

pub mod config;
pub mod runner;
pub mod scenarios;

pub use config::{Config, ConfigError, Target, Tolerance};
pub use runner::{check_all, run_scenario, Outcome, Registry, RunReport, ScenarioError};
pub use scenarios::Scenario;
