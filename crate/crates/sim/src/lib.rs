//! Scenario runner for `dwdm-core`: JSON scenario files, single runs and
//! parameter sweeps, and CSV/SVG/PGM output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod report;
pub mod runner;

pub use config::ScenarioConfig;
pub use error::{ConfigError, SimError};
pub use report::{ChannelReport, MetricsReport, SweepTable};
pub use runner::{q_uncertainty, run_scenario, run_sweep, RunOptions};
