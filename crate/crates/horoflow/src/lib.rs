//! Experiment driver for the horoball capillary flow: configuration files,
//! perturbed initial data, time-series and snapshot output, reports.
//!
//! The numerics live in [`horoflow_core`]; this crate adds the filesystem and
//! the `horoflow` command-line tool.
#![warn(missing_docs)]

pub mod config;
mod error;
pub mod experiment;
pub mod initial;
pub mod output;

pub use config::{ConfigWarning, ExperimentConfig, Perturbation};
pub use error::{ConfigError, RunError};
pub use experiment::{energy_compare, run_experiment, EnergyComparison, ExperimentReport};
pub use initial::{generate_initial, InitialData};
