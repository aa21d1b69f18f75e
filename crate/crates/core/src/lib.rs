//! Adaptive unimodular radar waveform design.
//!
//! * [`signal_model`]: simulated range-cell echoes `y = Aᴴα + ε`.
//! * [`objective`]: the matched-filter SINR criterion and its quadratic forms.
//! * [`uqp_solver`]: Dinkelbach fractional programming with power-method-like
//!   inner iterations.
//! * [`decor`]: the unfolded network with one PD weight matrix per layer.
//! * [`trainer`]: derivative-free online training by random walks in the PD cone.
//! * [`estimator`]: matched-filter target estimation and MSE.
//! * [`harness`]: configuration, experiments and CSV output for the CLI.

pub mod decor;
pub mod error;
pub mod estimator;
pub mod exec;
pub mod harness;
pub mod linalg;
pub mod objective;
pub mod rng;
pub mod signal_model;
pub mod trainer;
pub mod uqp_solver;

pub use decor::{activation, DecorParams};
pub use error::{Error, Result};
pub use estimator::{matched_filter_estimate, mse, EstimationRecord};
pub use exec::Execution;
pub use objective::{build_quadratic_pair, shift_matrix, sinr_objective, QuadraticPair};
pub use signal_model::{
    build_code_matrix, receive, sample_profile, EnvironmentConfig, ReceivedSignal, ScatteringProfile, UnimodularCode,
};
pub use trainer::{initialize, train, train_epoch, EpochRecord, S0Policy, TrainerConfig, TrainerState};
pub use uqp_solver::{build_chi, dinkelbach_design, min_eigenvalue, pmli_solve, pmli_step, UqpMatrix};
