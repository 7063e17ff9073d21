//! Experiment driver for the rise between toric potentials: random
//! instances, scenario runs, and CSV, JSON and SVG artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod generate;
pub mod records;
pub mod report;
pub mod scenarios;

pub use config::{Overrides, Scenario, ScenarioConfig};
pub use error::{LabError, LabResult};
pub use report::RunReport;
