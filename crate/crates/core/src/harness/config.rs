//! TOML experiment configuration.
//!
//! Recognised keys: `mode`, `n`, `code_lengths`, `depth`, `epochs`,
//! `candidates`, `radius_init`, `shrink`, `clutter_power`, `target_power`,
//! `noise_covariance`, `trials`, `seed`, `output_path`, `checkpoint_path`,
//! `s0_policy`. Anything else is rejected.
//!
//! ```toml
//! mode = "train"
//! n = 10
//! noise_covariance = "identity"          # or { scaled-identity = 0.5 }
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::CMatrix;
use crate::rng::{derive_seed, stream};
use crate::signal_model::EnvironmentConfig;
use crate::trainer::{S0Policy, TrainerConfig};
use super::oracle::MAX_ORACLE_LENGTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Train,
    Benchmark,
    PmliDesign,
    Oracle,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Train => "train",
            Mode::Benchmark => "benchmark",
            Mode::PmliDesign => "pmli-design",
            Mode::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseCovariance {
    Identity,
    ScaledIdentity(f64),
}

impl NoiseCovariance {
    pub fn scale(self) -> f64 {
        match self {
            NoiseCovariance::Identity => 1.0,
            NoiseCovariance::ScaledIdentity(f) => f,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Mode,
    n: Option<usize>,
    code_lengths: Option<Vec<usize>>,
    depth: Option<usize>,
    epochs: Option<usize>,
    candidates: Option<usize>,
    radius_init: Option<f64>,
    shrink: Option<f64>,
    clutter_power: Option<f64>,
    target_power: Option<f64>,
    noise_covariance: Option<NoiseCovariance>,
    trials: Option<usize>,
    seed: Option<u64>,
    output_path: Option<PathBuf>,
    checkpoint_path: Option<PathBuf>,
    s0_policy: Option<S0Policy>,
}

pub const DEFAULT_CODE_LENGTHS: [usize; 5] = [10, 25, 50, 100, 200];
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_ORACLE_LENGTH: usize = 4;

/// A validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    /// Master seed; every stream in the run is derived from it.
    pub seed: u64,
    /// Environment for the single-length modes (`train`, `pmli-design`,
    /// `oracle`). Benchmark cells resize it per code length.
    pub env: EnvironmentConfig,
    pub trainer: TrainerConfig,
    pub code_lengths: Vec<usize>,
    pub trials: usize,
    pub depth: usize,
    pub noise: NoiseCovariance,
    pub output_path: PathBuf,
    pub checkpoint_path: Option<PathBuf>,
    pub execution: Execution,
}

/// Trainer and environment seeds for a given code length. Train mode and the
/// benchmark's network cell use the same derivation, so the two agree.
pub fn seeds_for_length(master: u64, n: usize) -> (u64, u64) {
    (
        derive_seed(master, &[stream::TRAINER, n as u64]),
        derive_seed(master, &[stream::ENVIRONMENT, n as u64]),
    )
}

impl ExperimentConfig {
    /// Defaults for the given mode.
    pub fn defaults(mode: Mode) -> Self {
        Builder::new(mode).build().expect("defaults are valid")
    }

    /// Re-derives every seed from a new master seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        let (trainer_seed, env_seed) = seeds_for_length(seed, self.env.n());
        self.trainer.seed = trainer_seed;
        self.env = self.env.with_seed(env_seed);
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self.trainer.execution = execution;
        self
    }

    /// Environment and trainer configuration for one code length.
    pub fn cell(&self, n: usize) -> Result<(EnvironmentConfig, TrainerConfig)> {
        let (trainer_seed, env_seed) = seeds_for_length(self.seed, n);
        let env = environment(n, self.env.clutter_power(), self.env.target_power(), self.noise, env_seed)?;
        let trainer = TrainerConfig {
            seed: trainer_seed,
            ..self.trainer.clone()
        };
        Ok((env, trainer))
    }
}

fn environment(n: usize, clutter: f64, target: f64, noise: NoiseCovariance, seed: u64) -> Result<EnvironmentConfig> {
    let gamma = CMatrix::identity(n, n) * Complex64::new(noise.scale(), 0.0);
    EnvironmentConfig::new(n, clutter, target, gamma, seed)
}

struct Builder {
    mode: Mode,
    n: usize,
    code_lengths: Vec<usize>,
    depth: usize,
    epochs: usize,
    candidates: usize,
    radius_init: f64,
    shrink: f64,
    clutter_power: f64,
    target_power: f64,
    noise: NoiseCovariance,
    trials: usize,
    seed: u64,
    output_path: Option<PathBuf>,
    checkpoint_path: Option<PathBuf>,
    s0_policy: S0Policy,
}

impl Builder {
    fn new(mode: Mode) -> Self {
        let t = TrainerConfig::default();
        Self {
            mode,
            n: if mode == Mode::Oracle { DEFAULT_ORACLE_LENGTH } else { 10 },
            code_lengths: DEFAULT_CODE_LENGTHS.to_vec(),
            depth: t.depth,
            epochs: t.epochs,
            candidates: t.candidates,
            radius_init: t.radius_init,
            shrink: t.shrink,
            clutter_power: 1.0,
            target_power: 1.0,
            noise: NoiseCovariance::Identity,
            trials: DEFAULT_TRIALS,
            seed: 0,
            output_path: None,
            checkpoint_path: None,
            s0_policy: t.s0_policy,
        }
    }

    fn build(self) -> std::result::Result<ExperimentConfig, (&'static str, String)> {
        let fail = |key: &'static str, msg: String| Err((key, msg));
        if self.n < 2 {
            return fail("n", format!("must be >= 2, got {}", self.n));
        }
        if self.mode == Mode::Oracle && self.n > MAX_ORACLE_LENGTH {
            return fail("n", format!("oracle mode needs n <= {MAX_ORACLE_LENGTH}, got {}", self.n));
        }
        if self.code_lengths.is_empty() {
            return fail("code_lengths", "must not be empty".into());
        }
        if let Some(bad) = self.code_lengths.iter().find(|&&n| n < 2) {
            return fail("code_lengths", format!("every length must be >= 2, got {bad}"));
        }
        if self.depth == 0 {
            return fail("depth", "must be >= 1".into());
        }
        if self.candidates == 0 {
            return fail("candidates", "must be >= 1".into());
        }
        if !(self.radius_init > 0.0 && self.radius_init.is_finite()) {
            return fail("radius_init", format!("must be > 0, got {}", self.radius_init));
        }
        if !(self.shrink > 0.0 && self.shrink <= 1.0) {
            return fail("shrink", format!("must lie in (0, 1], got {}", self.shrink));
        }
        if !(self.clutter_power >= 0.0 && self.clutter_power.is_finite()) {
            return fail("clutter_power", format!("must be >= 0, got {}", self.clutter_power));
        }
        if !(self.target_power >= 0.0 && self.target_power.is_finite()) {
            return fail("target_power", format!("must be >= 0, got {}", self.target_power));
        }
        let scale = self.noise.scale();
        if !(scale >= 0.0 && scale.is_finite()) {
            return fail("noise_covariance", format!("scale factor must be >= 0, got {scale}"));
        }
        if self.trials == 0 {
            return fail("trials", "must be >= 1".into());
        }
        let (trainer_seed, env_seed) = seeds_for_length(self.seed, self.n);
        let env = environment(self.n, self.clutter_power, self.target_power, self.noise, env_seed)
            .map_err(|e| ("n", e.to_string()))?;
        let trainer = TrainerConfig {
            candidates: self.candidates,
            radius_init: self.radius_init,
            shrink: self.shrink,
            epochs: self.epochs,
            depth: self.depth,
            seed: trainer_seed,
            s0_policy: self.s0_policy,
            execution: Execution::Parallel,
        };
        let output_path = self
            .output_path
            .unwrap_or_else(|| PathBuf::from(format!("decor_{}.csv", self.mode.name().replace('-', "_"))));
        Ok(ExperimentConfig {
            mode: self.mode,
            seed: self.seed,
            env,
            trainer,
            code_lengths: self.code_lengths,
            trials: self.trials,
            depth: self.depth,
            noise: self.noise,
            output_path,
            checkpoint_path: self.checkpoint_path,
            execution: Execution::Parallel,
        })
    }
}

/// 1-based line on which `key = ...` is assigned, if any.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .map(|rest| rest.trim_start().starts_with('='))
            .unwrap_or(false)
    })
    .map(|i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses configuration text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let message = e.message().trim().to_string();
        let key = message
            .split('`')
            .nth(1)
            .filter(|k| !k.is_empty() && !k.contains(' '))
            .map(str::to_string);
        Error::Config {
            line: e.span().map(|s| line_of_offset(text, s.start)),
            key,
            message,
        }
    })?;
    let mut b = Builder::new(raw.mode);
    macro_rules! take {
        ($($field:ident),*) => { $( if let Some(v) = raw.$field { b.$field = v; } )* };
    }
    take!(n, code_lengths, depth, epochs, candidates, radius_init, shrink, clutter_power, target_power, trials, seed, s0_policy);
    if let Some(v) = raw.noise_covariance {
        b.noise = v;
    }
    b.output_path = raw.output_path;
    b.checkpoint_path = raw.checkpoint_path;
    b.build().map_err(|(key, message)| Error::Config {
        line: key_line(text, key),
        key: Some(key.to_string()),
        message,
    })
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        key: None,
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config(&text)
}
