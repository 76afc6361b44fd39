//! Config-driven experiments over the `onef-core` generators and estimators.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{parse_config, ConfigError, Estimator, ExperimentConfig, ExperimentName};
pub use experiments::{
    analyze_series, generate_series, run_experiment, Check, RunStatus, RunSummary,
};
pub use output::{read_csv, read_series, write_csv, write_summary, Cell, Table};
