//! Exit-gate checks. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use decor::exec::Execution;
use decor::harness::experiments::{
    benchmark_csv, monte_carlo_mse, oracle_comparison, run_oracle_experiment, run_pmli_design,
    run_training_experiment, training_csv, BenchmarkRow, Method,
};
use decor::harness::{run_mse_benchmark, ExperimentConfig, Mode};
use decor::linalg::{CMatrix, CVector};
use decor::rng::{complex_normal, derived_rng, rng_from_seed};
use decor::signal_model::observe;
use decor::trainer::{train, TrainerConfig};
use decor::uqp_solver::{build_chi, dinkelbach_design, min_eigenvalue, pmli_step, UqpMatrix};
use decor::{build_quadratic_pair, matched_filter_estimate, DecorParams, EnvironmentConfig, UnimodularCode};
use num_complex::Complex64;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond { Ok(detail) } else { Err(detail) }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed <= limit {
        Ok(())
    } else {
        Err(format!("runtime {elapsed:.2?} exceeds {limit:?}"))
    }
}

fn random_psd(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| complex_normal(rng, 1.0));
    &g * g.adjoint()
}

/// 1. PMLI monotonicity.
fn pmli_monotonicity() -> Outcome {
    let start = Instant::now();
    let mut rng = rng_from_seed(1);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let chi = UqpMatrix::new(random_psd(16, &mut rng)).map_err(|e| e.to_string())?;
        let mut s = UnimodularCode::random(16, &mut rng).unwrap();
        let mut prev = chi.value(&s);
        for _ in 0..50 {
            s = pmli_step(&chi, &s);
            let next = chi.value(&s);
            worst = worst.min((next - prev) / prev.abs());
            if next < prev - 1e-10 * prev.abs() {
                return Err(format!("objective fell from {prev} to {next}"));
            }
            prev = next;
        }
    }
    within(start.elapsed(), Duration::from_secs(5))?;
    check(true, format!("100 matrices x 50 steps, worst relative step {worst:.3e}"))
}

/// 2. Dinkelbach outer monotonicity.
fn dinkelbach_monotonicity() -> Outcome {
    let start = Instant::now();
    let env = EnvironmentConfig::standard(10, 2).unwrap();
    let mut worst = f64::INFINITY;
    for run in 0..50u64 {
        let mut rng = derived_rng(2, &[run]);
        let s0 = UnimodularCode::random(10, &mut rng).unwrap();
        let y = observe(&s0, &env, &mut rng).unwrap().y;
        let out = dinkelbach_design(&y, &s0, 20, 30).map_err(|e| e.to_string())?;
        for w in out.f_trace.windows(2) {
            worst = worst.min((w[1] - w[0]) / w[0]);
            if w[1] < w[0] * (1.0 - 1e-9) {
                return Err(format!("run {run}: f fell from {} to {}", w[0], w[1]));
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    check(true, format!("50 environments, worst relative step {worst:.3e}"))
}

/// 3. Tied-weights unfolding equivalence.
fn tied_weights() -> Outcome {
    let mut rng = rng_from_seed(3);
    for pair in 0..20 {
        let n = rng.random_range(2..=12);
        let chi = random_psd(n, &mut rng) + CMatrix::identity(n, n) * Complex64::new(1e-3, 0.0);
        let s0 = UnimodularCode::random(n, &mut rng).unwrap();
        let net = DecorParams::new(vec![chi.clone(); 30]).map_err(|e| e.to_string())?;
        let via_net = net.forward(&s0).unwrap();
        let uqp = UqpMatrix::new(chi).unwrap();
        let mut s = s0;
        for _ in 0..30 {
            s = pmli_step(&uqp, &s);
        }
        if via_net != s {
            return Err(format!("pair {pair} (N = {n}) differs"));
        }
    }
    check(true, "20 random (chi, s0) pairs identical bit for bit".into())
}

/// 4. Training-trace monotonicity.
fn training_trace() -> Outcome {
    let start = Instant::now();
    let mut improved = 0;
    for seed in 0..10u64 {
        let cfg = TrainerConfig {
            candidates: 8,
            epochs: 50,
            depth: 30,
            seed,
            ..TrainerConfig::default()
        };
        let env = EnvironmentConfig::standard(10, 1000 + seed).unwrap();
        let (_, log) = train(&cfg, &env).map_err(|e| e.to_string())?;
        if log.windows(2).any(|w| w[1].incumbent_value < w[0].incumbent_value) {
            return Err(format!("seed {seed}: incumbent decreased"));
        }
        if log.last().unwrap().incumbent_value > log[0].incumbent_value {
            improved += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    check(improved >= 9, format!("non-decreasing for 10/10 seeds, strictly improved for {improved}/10"))
}

/// 5. Brute-force optimality gap.
fn optimality_gap() -> Outcome {
    let start = Instant::now();
    let mut hits = 0;
    let mut worst = f64::INFINITY;
    for env_index in 0..20u64 {
        let env = EnvironmentConfig::standard(4, 500 + env_index).unwrap();
        let cmp = oracle_comparison(&env, 500 + env_index, 16, 20, 30, Execution::Parallel)
            .map_err(|e| e.to_string())?;
        if cmp.grid.values.len() != 4096 {
            return Err(format!("grid has {} points", cmp.grid.values.len()));
        }
        worst = worst.min(cmp.ratio());
        if cmp.ratio() >= 0.95 {
            hits += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    check(hits >= 18, format!("{hits}/20 environments within 95% of grid optimum (worst {:.2}%)", 100.0 * worst))
}

/// 6. Diagonal loading.
fn diagonal_loading() -> Outcome {
    let mut rng = rng_from_seed(6);
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(2..=12);
        let y = CVector::from_fn(n, |_, _| complex_normal(&mut rng, rng_scale(n)));
        let pair = build_quadratic_pair(&y).unwrap();
        let f_star = rng.random::<f64>() * 10.0;
        let chi = build_chi(&pair, f_star).map_err(|e| e.to_string())?;
        worst = worst.min(min_eigenvalue(chi.chi()).unwrap());
    }
    check(worst >= -1e-10, format!("200 instances, smallest eigenvalue {worst:.3e}"))
}

fn rng_scale(n: usize) -> f64 {
    1.0 + n as f64
}

/// 7. Estimator sanity.
fn estimator_sanity() -> Outcome {
    let clean = EnvironmentConfig::new(16, 0.0, 1.0, CMatrix::zeros(16, 16), 0).unwrap();
    let mut rng = rng_from_seed(7);
    for _ in 0..100 {
        let s = UnimodularCode::random(16, &mut rng).unwrap();
        let rx = observe(&s, &clean, &mut rng).unwrap();
        let est = matched_filter_estimate(&s, &rx.y).unwrap();
        if (est - rx.truth.target()).norm() > 1e-12 {
            return Err(format!("clean estimate off by {:e}", (est - rx.truth.target()).norm()));
        }
    }
    let env = EnvironmentConfig::standard(50, 0).unwrap();
    let s = UnimodularCode::random(50, &mut rng).unwrap();
    let errors: Vec<Complex64> = (0..10_000)
        .map(|_| {
            let rx = observe(&s, &env, &mut rng).unwrap();
            matched_filter_estimate(&s, &rx.y).unwrap() - rx.truth.target()
        })
        .collect();
    let mean = errors.iter().sum::<Complex64>() / errors.len() as f64;
    let std = (errors.iter().map(|e| (e - mean).norm_sqr()).sum::<f64>() / (errors.len() - 1) as f64).sqrt();
    check(
        mean.norm() <= 3.0 * std / 100.0,
        format!("exact on 100 clean draws; |bias| = {:.3e} vs bound {:.3e}", mean.norm(), 3.0 * std / 100.0),
    )
}

/// 8. MSE trend and design benefit.
fn mse_trend() -> Outcome {
    let start = Instant::now();
    let mut cfg = ExperimentConfig::defaults(Mode::Benchmark);
    cfg.code_lengths = vec![10, 25, 50];
    cfg.trials = 1000;
    cfg.output_path = std::env::temp_dir().join("decor_acceptance_benchmark.csv");
    let rows = run_mse_benchmark(&cfg, |_| {}).map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(300))?;
    let get = |n: usize, m: Method| rows.iter().find(|r| r.n == n && r.method == m).unwrap().mse;
    let mut problems = Vec::new();
    for m in Method::ALL {
        let series: Vec<f64> = cfg.code_lengths.iter().map(|&n| get(n, m)).collect();
        if !series.windows(2).all(|w| w[1] < w[0]) {
            problems.push(format!("{} not decreasing {:?}", m.name(), series));
        }
    }
    for &n in &cfg.code_lengths {
        if get(n, Method::Decor) > get(n, Method::Random) {
            problems.push(format!(
                "N={n}: decor {:.4} > random {:.4}",
                get(n, Method::Decor),
                get(n, Method::Random)
            ));
        }
    }
    let table: Vec<String> = rows.iter().map(|r| format!("{}/{}={:.4}", r.n, r.method.name(), r.mse)).collect();
    if problems.is_empty() {
        Ok(table.join(" "))
    } else {
        Err(format!("{}; table: {}", problems.join("; "), table.join(" ")))
    }
}

/// 9. Determinism, with and without internal parallelism.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let read = |p: &std::path::Path| std::fs::read(p).unwrap();

    let mut outputs = Vec::new();
    for (mode, tweak) in [
        (Mode::Train, None),
        (Mode::Benchmark, Some(vec![10, 25])),
        (Mode::PmliDesign, None),
        (Mode::Oracle, None),
    ] {
        let mut files = Vec::new();
        for (run, exec) in [Execution::Parallel, Execution::Parallel, Execution::Sequential].into_iter().enumerate() {
            let mut cfg = ExperimentConfig::defaults(mode).with_seed(9).with_execution(exec);
            if let Some(lengths) = &tweak {
                cfg.code_lengths = lengths.clone();
                cfg.trials = 300;
                cfg.trainer.epochs = 10;
            }
            cfg.output_path = dir.path().join(format!("{}_{run}.csv", mode.name()));
            if mode == Mode::Train {
                cfg.checkpoint_path = Some(dir.path().join(format!("net_{run}.ckpt")));
            }
            match mode {
                Mode::Train => run_training_experiment(&cfg).map(|_| ()),
                Mode::Benchmark => run_mse_benchmark(&cfg, |_| {}).map(|_| ()),
                Mode::PmliDesign => run_pmli_design(&cfg).map(|_| ()),
                Mode::Oracle => run_oracle_experiment(&cfg).map(|_| ()),
            }
            .map_err(|e| format!("{}: {e}", mode.name()))?;
            let mut bytes = read(&cfg.output_path);
            if let Some(ck) = &cfg.checkpoint_path {
                bytes.extend(read(ck));
            }
            files.push(bytes);
        }
        if files.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{} output differs between runs", mode.name()));
        }
        outputs.push(mode.name());
    }

    // Monte-Carlo scoring and CSV rendering on their own.
    let env = EnvironmentConfig::standard(20, 4).unwrap();
    let code = UnimodularCode::random(20, &mut rng_from_seed(4)).unwrap();
    let a = monte_carlo_mse(&code, &env, 4, Method::Random, 2000, Execution::Parallel).unwrap();
    let b = monte_carlo_mse(&code, &env, 4, Method::Random, 2000, Execution::Sequential).unwrap();
    let rows = |v| vec![BenchmarkRow { n: 20, method: Method::Random, mse: v, trials: 2000, seed: 4 }];
    if benchmark_csv(&rows(a)) != benchmark_csv(&rows(b)) {
        return Err("Monte-Carlo MSE depends on execution policy".into());
    }
    let cfg = TrainerConfig { epochs: 5, depth: 4, ..TrainerConfig::default() };
    let env = EnvironmentConfig::standard(8, 1).unwrap();
    let seq = train(&TrainerConfig { execution: Execution::Sequential, ..cfg.clone() }, &env).unwrap();
    let par = train(&cfg, &env).unwrap();
    check(
        training_csv(&seq.1) == training_csv(&par.1),
        format!("byte-identical CSV for {} (parallel, parallel, sequential)", outputs.join(", ")),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 PMLI monotonicity", pmli_monotonicity),
        ("2 Dinkelbach outer monotonicity", dinkelbach_monotonicity),
        ("3 tied-weights unfolding equivalence", tied_weights),
        ("4 training-trace monotonicity", training_trace),
        ("5 brute-force optimality gap", optimality_gap),
        ("6 diagonal loading", diagonal_loading),
        ("7 estimator sanity", estimator_sanity),
        ("8 MSE trend and design benefit", mse_trend),
        ("9 determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("[PASS] criterion {name} ({elapsed:.2?}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {name} ({elapsed:.2?}): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
