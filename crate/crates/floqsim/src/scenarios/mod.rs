//! Named, reproducible experiment scenarios behind the `floqsim` CLI.

mod config;
mod output;
mod runs;

pub use config::{ExperimentConfig, LambdaConvention, Scenario};
pub use output::{OutputFiles, ResultRecord};
pub use runs::{estimates_scenario, run_scenario, sweep_anharmonicity};
