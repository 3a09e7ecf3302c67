//! Config-driven experiments over the coasdim workbench: each run writes a
//! JSON report holding its status, the resolved config and the results.

pub mod config;
pub mod registry;
pub mod run;

pub use config::{ExperimentConfig, Kind};
pub use run::{resolve, run_experiment, ReportFile, Status};
