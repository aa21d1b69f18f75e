use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use decor::harness::{self, ExperimentConfig, Mode};
use decor::Error;

// Closed pipes on stdout are not errors for a summary line.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(name = "decor", version, about = "Unimodular radar waveform design experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML configuration file. Defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path, overrides the configuration.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Online training of the unfolded network; writes the per-epoch log.
    Train(Common),
    /// Matched-filter MSE of trained, model-based and random codes per code length.
    Benchmark(Common),
    /// Dinkelbach/PMLI design from one observed echo.
    PmliDesign(Common),
    /// Grid-exhaustive optimum versus the model-based designer (n <= 5).
    Oracle(Common),
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

fn load(mode: Mode, common: &Common) -> decor::Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => harness::load_config(path)?,
        None => ExperimentConfig::defaults(mode),
    };
    if cfg.mode != mode {
        return Err(Error::Config {
            key: Some("mode".into()),
            line: None,
            message: format!("subcommand `{}` cannot run a `{}` configuration", mode.name(), cfg.mode.name()),
        });
    }
    if let Some(seed) = common.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(out) = &common.output {
        cfg.output_path = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> decor::Result<()> {
    let (mode, common) = match &cli.command {
        Command::Train(c) => (Mode::Train, c),
        Command::Benchmark(c) => (Mode::Benchmark, c),
        Command::PmliDesign(c) => (Mode::PmliDesign, c),
        Command::Oracle(c) => (Mode::Oracle, c),
    };
    let cfg = load(mode, common)?;
    let quiet = common.quiet;
    match mode {
        Mode::Train => {
            let out = harness::run_training_experiment(&cfg)?;
            if !quiet {
                let accepted = out.log.iter().skip(1).filter(|r| r.accepted).count();
                say!(
                    "trained N={} L={} for {} epochs: f = {:.6e} -> {:.6e} ({accepted} accepted)",
                    cfg.env.n(),
                    cfg.depth,
                    cfg.trainer.epochs,
                    out.log[0].incumbent_value,
                    out.state.incumbent_value,
                );
            }
        }
        Mode::Benchmark => {
            harness::run_mse_benchmark(&cfg, |cell| {
                if !quiet {
                    for row in cell {
                        say!("N={:<4} {:<11} mse={:.6}", row.n, row.method.name(), row.mse);
                    }
                }
            })?;
        }
        Mode::PmliDesign => {
            let out = harness::run_pmli_design(&cfg)?;
            if !quiet {
                say!(
                    "N={}: f = {:.6e} -> {:.6e} over {} outer steps",
                    cfg.env.n(),
                    out.f_trace[0],
                    out.value(),
                    out.f_trace.len() - 1
                );
            }
        }
        Mode::Oracle => {
            let cmp = harness::run_oracle_experiment(&cfg)?;
            if !quiet {
                say!(
                    "N={} grid optimum {:.6e}, designed {:.6e} ({:.2}%)",
                    cfg.env.n(),
                    cmp.grid.best_value,
                    cmp.design.value(),
                    100.0 * cmp.ratio()
                );
            }
        }
    }
    if !quiet {
        say!("wrote {}", cfg.output_path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
