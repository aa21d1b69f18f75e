use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use decor::exec::Execution;
use decor::harness::experiments::{monte_carlo_mse, Method};
use decor::rng::rng_from_seed;
use decor::trainer::{initialize, train_epoch, TrainerConfig};
use decor::uqp_solver::dinkelbach_best_of;
use decor::signal_model::observe;
use decor::{EnvironmentConfig, UnimodularCode};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn training_epoch(c: &mut Criterion) {
    let mut group = c.benchmark_group("train_epoch");
    group.sample_size(10);
    for n in [10, 50] {
        let env = EnvironmentConfig::standard(n, 1).unwrap();
        for (name, execution) in POLICIES {
            let cfg = TrainerConfig { execution, ..TrainerConfig::default() };
            let start = initialize(&cfg, &env).unwrap();
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| {
                    let mut state = start.clone();
                    train_epoch(&mut state, &cfg, &env).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("monte_carlo_mse");
    group.sample_size(10);
    for n in [25, 100] {
        let env = EnvironmentConfig::standard(n, 2).unwrap();
        let code = UnimodularCode::random(n, &mut rng_from_seed(2)).unwrap();
        for (name, execution) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| monte_carlo_mse(&code, &env, 2, Method::Random, 1000, execution).unwrap())
            });
        }
    }
    group.finish();
}

fn restarts(c: &mut Criterion) {
    let mut group = c.benchmark_group("dinkelbach_best_of");
    group.sample_size(10);
    let n = 16;
    let env = EnvironmentConfig::standard(n, 3).unwrap();
    let mut rng = rng_from_seed(3);
    let probe = UnimodularCode::random(n, &mut rng).unwrap();
    let y = observe(&probe, &env, &mut rng).unwrap().y;
    let starts: Vec<UnimodularCode> = (0..20).map(|_| UnimodularCode::random(n, &mut rng).unwrap()).collect();
    for (name, execution) in POLICIES {
        group.bench_function(name, |b| b.iter(|| dinkelbach_best_of(&y, &starts, 20, 30, execution).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, training_epoch, monte_carlo, restarts);
criterion_main!(benches);
