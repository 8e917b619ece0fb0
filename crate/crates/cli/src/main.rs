//! `udnsim` command line: run one scenario or a full grid and write
//! `aggregate.csv` and `runs.csv`.
//!
//! Exit status: 0 on success, 2 for configuration errors, 1 for runtime errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use udnsim::{run_sweep, write_csv, SimConfig, SimError};

#[derive(Parser)]
#[command(name = "udnsim", version, about = "Handover simulator for ultra-dense 5G networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single scenario for its replicates.
    Simulate(Options),
    /// Run every scenario of the grid.
    Sweep(Options),
}

#[derive(Args)]
struct Options {
    /// TOML configuration file; defaults give the standard 600-point grid.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Route label(s), e.g. A or B. Comma separated for sweeps.
    #[arg(long, value_delimiter = ',')]
    case: Vec<String>,
    /// gNB density per km².
    #[arg(long, value_delimiter = ',')]
    density: Vec<u32>,
    /// Time-to-trigger in tics.
    #[arg(long, value_delimiter = ',')]
    ttt: Vec<u32>,
    /// TU speed in km/h.
    #[arg(long, value_delimiter = ',')]
    velocity: Vec<f64>,
    #[arg(long)]
    replicates: Option<u32>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the CSV files.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Reuse one topology per (case, density) for all replicates.
    #[arg(long)]
    fixed_topology: bool,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn build_config(opts: &Options, single: bool) -> Result<SimConfig, Failure> {
    let mut cfg = match &opts.config {
        Some(path) => SimConfig::load(path).map_err(|e| Failure::Config(e.to_string()))?,
        None => SimConfig::default(),
    };
    let s = &mut cfg.sweep;
    if !opts.case.is_empty() {
        s.cases = opts.case.clone();
    }
    if !opts.density.is_empty() {
        s.densities = opts.density.clone();
    }
    if !opts.ttt.is_empty() {
        s.ttt_tics = opts.ttt.clone();
    }
    if !opts.velocity.is_empty() {
        s.velocities_kmh = opts.velocity.clone();
    }
    if let Some(r) = opts.replicates {
        s.replicates = r;
    }
    if let Some(seed) = opts.seed {
        s.master_seed = seed;
    }
    if opts.fixed_topology {
        s.fixed_topology = true;
    }
    if single {
        for (flag, n) in [
            ("--case", s.cases.len()),
            ("--density", s.densities.len()),
            ("--ttt", s.ttt_tics.len()),
            ("--velocity", s.velocities_kmh.len()),
        ] {
            if n != 1 {
                return Err(Failure::Config(format!(
                    "simulate needs exactly one value for {flag} (got {n})"
                )));
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(opts: &Options, single: bool) -> Result<(), Failure> {
    let cfg = build_config(opts, single)?;
    let parallelism = match opts.parallelism {
        Some(0) => return Err(Failure::Config("--parallelism must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let grid = cfg.scenarios();
    let t0 = Instant::now();
    let result = run_sweep(&grid, parallelism)?;
    let (agg, runs) = write_csv(&result, &opts.out)?;
    eprintln!(
        "{} scenario(s), {} run(s) in {:.1} s; config digest {}",
        result.rows.len(),
        result.runs.len(),
        t0.elapsed().as_secs_f64(),
        result.provenance.config_digest
    );
    if single {
        let row = &result.rows[0];
        println!(
            "{}: mean_ho_rate={:.4} ho_avg_sinr_db={:.4} failure_flag={}",
            row.scenario, row.mean_ho_rate, row.ho_avg_sinr_db, row.failure_flag
        );
    }
    println!("{}\n{}", agg.display(), runs.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Simulate(opts) => execute(opts, true),
        Command::Sweep(opts) => execute(opts, false),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
