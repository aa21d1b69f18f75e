//! Experiment drivers behind the CLI subcommands. Every driver returns its
//! results and writes a CSV whose first line is a `# decor-csv v1 <kind>`
//! comment.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::estimator::{matched_filter_estimate, mse, EstimationRecord};
use crate::exec::Execution;
use crate::harness::config::{ExperimentConfig, Mode};
use crate::harness::oracle::{run_bruteforce_oracle, BruteForceResult, MAX_GRID_LEVELS};
use crate::rng::{derived_rng, stream};
use crate::signal_model::{observe, EnvironmentConfig, UnimodularCode};
use crate::trainer::{train, EpochRecord, S0Policy, TrainerState};
use crate::uqp_solver::{dinkelbach_best_of, dinkelbach_design, DinkelbachOutcome, DEFAULT_OUTER_ITERS};

pub const CSV_SCHEMA: &str = "decor-csv v1";
/// Random starts for the oracle comparison.
pub const ORACLE_RESTARTS: usize = 20;

fn require_mode(cfg: &ExperimentConfig, mode: Mode) -> Result<()> {
    if cfg.mode != mode {
        return Err(Error::domain(format!(
            "configuration is for mode `{}`, not `{}`",
            cfg.mode.name(),
            mode.name()
        )));
    }
    Ok(())
}

fn header(kind: &str, columns: &str) -> String {
    format!("# {CSV_SCHEMA} {kind}\n{columns}\n")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn training_csv(log: &[EpochRecord]) -> String {
    let mut out = header("training", "epoch,incumbent_value,best_candidate_value,accepted,radius");
    for r in log {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{},{:?}",
            r.epoch, r.incumbent_value, r.best_candidate_value, r.accepted as u8, r.radius
        );
    }
    out
}

#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub state: TrainerState,
    pub log: Vec<EpochRecord>,
}

/// Trains one network, writes the per-epoch log and, when configured, the
/// final checkpoint.
pub fn run_training_experiment(cfg: &ExperimentConfig) -> Result<TrainingOutcome> {
    require_mode(cfg, Mode::Train)?;
    let (state, log) = train(&cfg.trainer, &cfg.env)?;
    write_file(&cfg.output_path, &training_csv(&log))?;
    if let Some(path) = &cfg.checkpoint_path {
        state.params.save(path)?;
    }
    Ok(TrainingOutcome { state, log })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Decor,
    Dinkelbach,
    Random,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Decor, Method::Dinkelbach, Method::Random];

    pub fn name(self) -> &'static str {
        match self {
            Method::Decor => "decor",
            Method::Dinkelbach => "dinkelbach",
            Method::Random => "random",
        }
    }

    fn tag(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub n: usize,
    pub method: Method,
    pub mse: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Matched-filter MSE of `code` over `trials` independent environment draws.
/// Trial `i` draws from the stream `(master, n, method, i)`.
pub fn monte_carlo_mse(
    code: &UnimodularCode,
    env: &EnvironmentConfig,
    master: u64,
    method: Method,
    trials: usize,
    exec: Execution,
) -> Result<f64> {
    let n = code.len() as u64;
    let records = exec.map_indexed(trials, |i| -> Result<EstimationRecord> {
        let mut rng = derived_rng(master, &[stream::TRIAL, n, method.tag(), i as u64]);
        let rx = observe(code, env, &mut rng)?;
        Ok(EstimationRecord::new(matched_filter_estimate(code, &rx.y)?, rx.truth.target()))
    });
    let records: Vec<_> = records.into_iter().collect::<Result<_>>()?;
    mse(&records)
}

/// Codes compared at one code length.
#[derive(Debug, Clone)]
pub struct DesignedCodes {
    pub decor: UnimodularCode,
    pub dinkelbach: UnimodularCode,
    pub random: UnimodularCode,
}

impl DesignedCodes {
    pub fn get(&self, method: Method) -> &UnimodularCode {
        match method {
            Method::Decor => &self.decor,
            Method::Dinkelbach => &self.dinkelbach,
            Method::Random => &self.random,
        }
    }
}

/// Trains the network, runs the model-based designer on one observed echo of
/// a random probe code, and draws the random control code.
pub fn design_codes(cfg: &ExperimentConfig, n: usize) -> Result<DesignedCodes> {
    let (env, trainer) = cfg.cell(n)?;
    let (state, _) = train(&trainer, &env)?;

    let mut probe_rng = derived_rng(cfg.seed, &[stream::BASELINE_ENV, n as u64]);
    let probe = UnimodularCode::random(n, &mut probe_rng)?;
    let y = observe(&probe, &env, &mut probe_rng)?.y;
    let baseline = dinkelbach_design(&y, &probe, DEFAULT_OUTER_ITERS, cfg.depth)?;

    let random = UnimodularCode::random(n, &mut derived_rng(cfg.seed, &[stream::RANDOM_CODE, n as u64]))?;
    Ok(DesignedCodes {
        decor: state.incumbent_code,
        dinkelbach: baseline.code,
        random,
    })
}

/// All benchmark rows for one code length, in [`Method::ALL`] order.
pub fn benchmark_cell(cfg: &ExperimentConfig, n: usize) -> Result<Vec<BenchmarkRow>> {
    let codes = design_codes(cfg, n)?;
    let (env, _) = cfg.cell(n)?;
    Method::ALL
        .iter()
        .map(|&method| {
            Ok(BenchmarkRow {
                n,
                method,
                mse: monte_carlo_mse(codes.get(method), &env, cfg.seed, method, cfg.trials, cfg.execution)?,
                trials: cfg.trials,
                seed: cfg.seed,
            })
        })
        .collect()
}

pub fn benchmark_csv(rows: &[BenchmarkRow]) -> String {
    let mut sorted: Vec<&BenchmarkRow> = rows.iter().collect();
    sorted.sort_by_key(|r| (r.n, r.method));
    let mut out = header("benchmark", "N,method,mse,trials,seed");
    for r in sorted {
        let _ = writeln!(out, "{},{},{:?},{},{}", r.n, r.method.name(), r.mse, r.trials, r.seed);
    }
    out
}

/// Runs every code length in `cfg.code_lengths`, calling `on_cell` after each,
/// then writes the CSV.
pub fn run_mse_benchmark(
    cfg: &ExperimentConfig,
    mut on_cell: impl FnMut(&[BenchmarkRow]),
) -> Result<Vec<BenchmarkRow>> {
    require_mode(cfg, Mode::Benchmark)?;
    let mut rows = Vec::new();
    for &n in &cfg.code_lengths {
        let cell = benchmark_cell(cfg, n)?;
        on_cell(&cell);
        rows.extend(cell);
    }
    write_file(&cfg.output_path, &benchmark_csv(&rows))?;
    Ok(rows)
}

fn transmit_code(cfg: &ExperimentConfig) -> Result<UnimodularCode> {
    let n = cfg.env.n();
    match cfg.trainer.s0_policy {
        S0Policy::AllOnes => UnimodularCode::ones(n),
        S0Policy::RandomPhase => UnimodularCode::random(n, &mut derived_rng(cfg.seed, &[stream::INIT_CODE])),
    }
}

/// Companion path for the designed code: `<stem>.code.csv` next to `path`.
pub fn code_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.code.csv"))
}

pub fn code_csv(code: &UnimodularCode) -> String {
    let mut out = header("code", "k,re,im");
    for (k, z) in code.as_vector().iter().enumerate() {
        let _ = writeln!(out, "{k},{:?},{:?}", z.re, z.im);
    }
    out
}

/// Transmits the configured start code once, then runs the model-based
/// designer on the observed echo. Writes the ratio trace to the output path
/// and the final code next to it.
pub fn run_pmli_design(cfg: &ExperimentConfig) -> Result<DinkelbachOutcome> {
    require_mode(cfg, Mode::PmliDesign)?;
    let s0 = transmit_code(cfg)?;
    let mut rng = derived_rng(cfg.env.seed(), &[stream::BASELINE_ENV]);
    let y = observe(&s0, &cfg.env, &mut rng)?.y;
    let outcome = dinkelbach_design(&y, &s0, DEFAULT_OUTER_ITERS, cfg.depth)?;
    let mut out = header("pmli-design", "iteration,objective");
    for (i, f) in outcome.f_trace.iter().enumerate() {
        let _ = writeln!(out, "{i},{f:?}");
    }
    write_file(&cfg.output_path, &out)?;
    write_file(&code_path(&cfg.output_path), &code_csv(&outcome.code))?;
    Ok(outcome)
}

#[derive(Debug, Clone)]
pub struct OracleComparison {
    pub grid: BruteForceResult,
    pub design: DinkelbachOutcome,
}

impl OracleComparison {
    /// Designed ratio over grid optimum.
    pub fn ratio(&self) -> f64 {
        self.design.value() / self.grid.best_value
    }
}

/// Grid-exhaustive optimum versus best-of-restarts Dinkelbach on the same echo.
pub fn oracle_comparison(
    env: &EnvironmentConfig,
    seed: u64,
    q: usize,
    restarts: usize,
    inner_iters: usize,
    exec: Execution,
) -> Result<OracleComparison> {
    let n = env.n();
    let mut rng = derived_rng(seed, &[stream::BASELINE_ENV, n as u64]);
    let probe = UnimodularCode::random(n, &mut rng)?;
    let y = observe(&probe, env, &mut rng)?.y;
    let grid = run_bruteforce_oracle(n, q, &y)?;
    let starts = (0..restarts)
        .map(|r| UnimodularCode::random(n, &mut derived_rng(seed, &[stream::RESTART, r as u64])))
        .collect::<Result<Vec<_>>>()?;
    let design = dinkelbach_best_of(&y, &starts, DEFAULT_OUTER_ITERS, inner_iters, exec)?;
    Ok(OracleComparison { grid, design })
}

pub fn run_oracle_experiment(cfg: &ExperimentConfig) -> Result<OracleComparison> {
    require_mode(cfg, Mode::Oracle)?;
    let cmp = oracle_comparison(&cfg.env, cfg.seed, MAX_GRID_LEVELS, ORACLE_RESTARTS, cfg.depth, cfg.execution)?;
    let mut out = header("oracle", "n,q,grid_points,grid_best,designed_best,ratio,grid_levels");
    let levels: Vec<String> = cmp.grid.best_levels.iter().map(|l| l.to_string()).collect();
    let _ = writeln!(
        out,
        "{},{},{},{:?},{:?},{:?},{}",
        cfg.env.n(),
        cmp.grid.grid_levels,
        cmp.grid.values.len(),
        cmp.grid.best_value,
        cmp.design.value(),
        cmp.ratio(),
        levels.join(";")
    );
    write_file(&cfg.output_path, &out)?;
    Ok(cmp)
}
