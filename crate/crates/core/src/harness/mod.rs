//! Configuration, experiment drivers, CSV output and the brute-force oracle.

pub mod config;
pub mod experiments;
pub mod oracle;

pub use config::{load_config, parse_config, ExperimentConfig, Mode, NoiseCovariance};
pub use experiments::{
    run_mse_benchmark, run_oracle_experiment, run_pmli_design, run_training_experiment, BenchmarkRow, Method,
};
pub use oracle::{run_bruteforce_oracle, BruteForceResult};
