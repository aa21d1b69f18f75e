//! Online random-walk training of the unfolded network.
//!
//! Each epoch perturbs every layer of the current parameters with a random
//! PSD direction `D = L Lᴴ` (`L` lower triangular, entries `CN(0, σ)`), builds
//! a small population of candidate networks, transmits each candidate's code
//! once into a fresh environment draw, and keeps the best candidate if its
//! SINR is at least the incumbent's. Acceptance resets `σ` to its initial
//! value; rejection shrinks it geometrically.
//!
//! Candidate `i` of epoch `t` draws its directions from the stream
//! `(trainer seed, t, i)` and its environment from `(environment seed, t, i)`,
//! so the outcome does not depend on evaluation order.

use rand::Rng;

use crate::decor::{DecorParams, DEFAULT_DEPTH};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::CMatrix;
use crate::objective::sinr_objective;
use crate::rng::{complex_normal, derived_rng, stream};
use crate::signal_model::{observe, EnvironmentConfig, UnimodularCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum S0Policy {
    #[default]
    AllOnes,
    RandomPhase,
}

#[derive(Debug, Clone)]
pub struct TrainerConfig {
    /// Candidates per epoch.
    pub candidates: usize,
    /// Search radius after an acceptance (`c`).
    pub radius_init: f64,
    /// Radius multiplier after a rejection (`δ`).
    pub shrink: f64,
    pub epochs: usize,
    pub depth: usize,
    pub seed: u64,
    pub s0_policy: S0Policy,
    pub execution: Execution,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            candidates: 8,
            radius_init: 0.1,
            shrink: 0.9,
            epochs: 50,
            depth: DEFAULT_DEPTH,
            seed: 0,
            s0_policy: S0Policy::AllOnes,
            execution: Execution::Parallel,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.candidates == 0 {
            return Err(Error::domain("candidates must be >= 1"));
        }
        if !(self.radius_init > 0.0 && self.radius_init.is_finite()) {
            return Err(Error::domain(format!("radius_init must be > 0, got {}", self.radius_init)));
        }
        if !(self.shrink > 0.0 && self.shrink <= 1.0) {
            return Err(Error::domain(format!("shrink must lie in (0, 1], got {}", self.shrink)));
        }
        if self.depth == 0 {
            return Err(Error::domain("depth must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerState {
    pub params: DecorParams,
    /// Network input, fixed for the whole run.
    pub s0: UnimodularCode,
    pub incumbent_code: UnimodularCode,
    pub incumbent_value: f64,
    pub radius: f64,
    pub epoch: usize,
    /// Consecutive rejected epochs since the last acceptance.
    pub rejection_run: usize,
}

/// One line of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub incumbent_value: f64,
    pub best_candidate_value: f64,
    pub accepted: bool,
    /// Radius after the epoch's update.
    pub radius: f64,
}

/// `L Lᴴ` for a random lower-triangular `L` with `CN(0, sigma)` entries.
pub fn sample_direction<R: Rng + ?Sized>(n: usize, sigma: f64, rng: &mut R) -> Result<CMatrix> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("search radius must be > 0, got {sigma}")));
    }
    let mut l = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..=r {
            l[(r, c)] = complex_normal(rng, sigma);
        }
    }
    let mut d = &l * l.adjoint();
    for i in 0..n {
        d[(i, i)].im = 0.0;
    }
    Ok(d)
}

fn candidate_directions<F>(state: &TrainerState, cfg: &TrainerConfig, index: usize, sampler: &F) -> Result<Vec<CMatrix>>
where
    F: Fn(usize, f64, &mut crate::rng::SimRng) -> Result<CMatrix>,
{
    let mut rng = derived_rng(cfg.seed, &[stream::CANDIDATE, state.epoch as u64, index as u64]);
    (0..state.params.depth())
        .map(|_| sampler(state.params.n(), state.radius, &mut rng))
        .collect()
}

/// Candidate parameter sets for the current epoch.
pub fn propose_candidates(state: &TrainerState, cfg: &TrainerConfig) -> Result<Vec<DecorParams>> {
    propose_candidates_with(state, cfg, |n, sigma, rng| sample_direction(n, sigma, rng))
}

/// [`propose_candidates`] with a custom direction sampler.
pub fn propose_candidates_with<F>(state: &TrainerState, cfg: &TrainerConfig, sampler: F) -> Result<Vec<DecorParams>>
where
    F: Fn(usize, f64, &mut crate::rng::SimRng) -> Result<CMatrix>,
{
    (0..cfg.candidates)
        .map(|i| Ok(state.params.perturbed(&candidate_directions(state, cfg, i, &sampler)?)))
        .collect()
}

fn score(code: &UnimodularCode, env: &EnvironmentConfig, path: &[u64]) -> Result<f64> {
    let mut rng = derived_rng(env.seed(), path);
    let rx = observe(code, env, &mut rng)?;
    match sinr_objective(code, &rx.y) {
        Ok(f) => Ok(f),
        Err(Error::DegenerateDenominator { .. }) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

/// Identity layers, the configured input code, and an incumbent from one
/// evaluation of the initial network.
pub fn initialize(cfg: &TrainerConfig, env: &EnvironmentConfig) -> Result<TrainerState> {
    cfg.validate()?;
    let n = env.n();
    let params = DecorParams::identity(n, cfg.depth)?;
    let s0 = match cfg.s0_policy {
        S0Policy::AllOnes => UnimodularCode::ones(n)?,
        S0Policy::RandomPhase => {
            UnimodularCode::random(n, &mut derived_rng(cfg.seed, &[stream::INIT_CODE]))?
        }
    };
    let incumbent_code = params.forward(&s0)?;
    let incumbent_value = score(&incumbent_code, env, &[stream::INIT_ENV])?;
    Ok(TrainerState {
        params,
        s0,
        incumbent_code,
        incumbent_value,
        radius: cfg.radius_init,
        epoch: 0,
        rejection_run: 0,
    })
}

/// The log line describing a freshly initialised state.
pub fn initial_record(state: &TrainerState) -> EpochRecord {
    EpochRecord {
        epoch: state.epoch,
        incumbent_value: state.incumbent_value,
        best_candidate_value: state.incumbent_value,
        accepted: true,
        radius: state.radius,
    }
}

/// One propose / transmit / select round.
pub fn train_epoch(state: &mut TrainerState, cfg: &TrainerConfig, env: &EnvironmentConfig) -> Result<EpochRecord> {
    cfg.validate()?;
    if env.n() != state.params.n() {
        return Err(Error::domain(format!(
            "environment length {} does not match network length {}",
            env.n(),
            state.params.n()
        )));
    }
    let t = state.epoch as u64;
    let sampler = |n: usize, sigma: f64, rng: &mut crate::rng::SimRng| sample_direction(n, sigma, rng);
    let snapshot = &*state;
    let evaluated = cfg.execution.map_indexed(cfg.candidates, |i| -> Result<(f64, UnimodularCode)> {
        let candidate = snapshot.params.perturbed(&candidate_directions(snapshot, cfg, i, &sampler)?);
        let code = candidate.forward(&snapshot.s0)?;
        let value = score(&code, env, &[stream::CANDIDATE_ENV, t, i as u64])?;
        Ok((value, code))
    });

    let mut best: Option<(usize, f64, UnimodularCode)> = None;
    for (i, result) in evaluated.into_iter().enumerate() {
        let (value, code) = result?;
        if best.as_ref().is_none_or(|(_, v, _)| value > *v) {
            best = Some((i, value, code));
        }
    }
    let (best_index, best_value, best_code) = best.expect("candidates >= 1");

    let accepted = best_value.is_finite() && best_value >= state.incumbent_value;
    if accepted {
        // Regenerate the winner from its stream instead of keeping every candidate alive.
        let directions = candidate_directions(state, cfg, best_index, &sampler)?;
        state.params = state.params.perturbed(&directions);
        state.incumbent_code = best_code;
        state.incumbent_value = best_value;
        state.radius = cfg.radius_init;
        state.rejection_run = 0;
    } else {
        state.radius *= cfg.shrink;
        state.rejection_run += 1;
    }
    state.epoch += 1;
    Ok(EpochRecord {
        epoch: state.epoch,
        incumbent_value: state.incumbent_value,
        best_candidate_value: best_value,
        accepted,
        radius: state.radius,
    })
}

/// Initialises and runs `cfg.epochs` epochs. The log starts with the
/// initial-state record.
pub fn train(cfg: &TrainerConfig, env: &EnvironmentConfig) -> Result<(TrainerState, Vec<EpochRecord>)> {
    let mut state = initialize(cfg, env)?;
    let mut log = Vec::with_capacity(cfg.epochs + 1);
    log.push(initial_record(&state));
    for _ in 0..cfg.epochs {
        log.push(train_epoch(&mut state, cfg, env)?);
    }
    Ok((state, log))
}
