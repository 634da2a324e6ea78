//! Configuration, orchestration, persistence and reports.

pub mod config;
pub mod persist;
pub mod report;
pub mod runner;

pub use config::{Counts, ExperimentConfig, ExperimentKind, SacSettings, Sweep};
pub use persist::{instance_from_str, instance_to_string, load_instance, save_instance};
pub use report::{Distribution, Report, ReportFormat, Table};
pub use runner::run;
