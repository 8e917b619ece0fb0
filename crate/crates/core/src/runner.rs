//! Single runs and full parameter sweeps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::deployment::{deploy_gnbs, GnbSet};
use crate::error::{Result, SimError};
use crate::geom::Point;
use crate::handover::{HandoverEvent, HandoverState, TicOutcome};
use crate::metrics::{AggregateRow, KpiAccumulator, RunResult};
use crate::radio::{LinkEvaluator, LinkSample};
use crate::seed::{run_seed, topology_seed};

/// Per-tic record of a run, for inspection and visualisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TicRecord {
    pub tic: u32,
    pub position: Point,
    /// Serving gNB after this tic was processed.
    pub serving_gnb: Option<usize>,
    pub serving_sinr_db: Option<f64>,
    pub best_gnb: Option<usize>,
    pub best_sinr_db: Option<f64>,
    pub avg_sinr_db: Option<f64>,
    pub ho_timer: u32,
}

/// A run with its full per-tic trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub gnbs: GnbSet,
    pub tics: Vec<TicRecord>,
    pub events: Vec<HandoverEvent>,
    pub result: RunResult,
}

/// Deploys the replicate's topology.
pub fn topology(config: &ScenarioConfig, replicate: u32) -> Result<GnbSet> {
    let rep = (!config.fixed_topology).then_some(replicate);
    let seed = topology_seed(config.master_seed, &config.case, config.den_gnb, rep);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    deploy_gnbs(&config.model.arena, config.den_gnb, config.model.gnb, &mut rng)
}

fn simulate<F>(config: &ScenarioConfig, replicate: u32, mut observe: F) -> Result<(GnbSet, RunResult)>
where
    F: FnMut(&HandoverState, &LinkSample, &TicOutcome, Point),
{
    config.validate()?;
    let key = config.key();
    let seed = run_seed(config.master_seed, &key, replicate);
    let gnbs = topology(config, replicate)?;
    let route = config.route()?;
    let params = config.handover_params();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut links = LinkEvaluator::new(config.model.radio);
    let mut state = HandoverState::new();
    let mut event_sinrs = Vec::new();
    let mut serving_sum = 0.0;
    let mut serving_n = 0u32;

    for tic in 0..route.duration_tics {
        let pos = route.position_at(tic)?;
        let sample = links.sample(tic, &gnbs, pos, state.serving_gnb, &mut rng);
        let outcome = state.step(&sample, &params)?;
        let serving_sinr = match outcome {
            TicOutcome::Attached(_) => sample.best_sinr_db,
            TicOutcome::Outage => None,
            _ => sample.serving_sinr_db,
        };
        if let Some(v) = serving_sinr {
            serving_sum += v;
            serving_n += 1;
        }
        if let TicOutcome::Handover(ev) = &outcome {
            event_sinrs.push(ev.best_sinr_db);
        }
        observe(&state, &sample, &outcome, pos);
    }

    let result = RunResult {
        scenario: key,
        replicate,
        seed,
        ho_times: state.ho_times,
        ho_event_sinrs: event_sinrs,
        outage_tics: state.outage_tics,
        mean_serving_sinr_db: if serving_n == 0 {
            f64::NAN
        } else {
            serving_sum / f64::from(serving_n)
        },
    };
    Ok((gnbs, result))
}

/// Runs one replicate of a scenario. Deterministic in (master seed, scenario, replicate).
pub fn run_single(config: &ScenarioConfig, replicate: u32) -> Result<RunResult> {
    simulate(config, replicate, |_, _, _, _| {}).map(|(_, r)| r)
}

/// Like [`run_single`] but keeps every tic.
pub fn run_trace(config: &ScenarioConfig, replicate: u32) -> Result<RunTrace> {
    let window_len = config.model.handover.window_len;
    let mut tics = Vec::with_capacity(config.model.duration_tics as usize);
    let mut events = Vec::new();
    let (gnbs, result) = simulate(config, replicate, |state, sample, outcome, pos| {
        if let TicOutcome::Handover(ev) = outcome {
            events.push(*ev);
        }
        tics.push(TicRecord {
            tic: sample.tic,
            position: pos,
            serving_gnb: state.serving_gnb,
            serving_sinr_db: match outcome {
                TicOutcome::Attached(_) => sample.best_sinr_db,
                TicOutcome::Outage => None,
                _ => sample.serving_sinr_db,
            },
            best_gnb: sample.best_gnb,
            best_sinr_db: sample.best_sinr_db,
            avg_sinr_db: state.avg_sinr(window_len),
            ho_timer: state.ho_timer,
        });
    })?;
    Ok(RunTrace {
        gnbs,
        tics,
        events,
        result,
    })
}

/// Where a sweep came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seeds: Vec<u64>,
    /// SHA-256 over the ordered scenario definitions.
    pub config_digest: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<AggregateRow>,
    /// Replicates grouped by scenario in grid order, ascending replicate within a scenario.
    pub runs: Vec<RunResult>,
    pub provenance: Provenance,
}

impl SweepResult {
    pub fn empty() -> Self {
        SweepResult {
            rows: Vec::new(),
            runs: Vec::new(),
            provenance: provenance(&[]),
        }
    }
}

fn provenance(grid: &[ScenarioConfig]) -> Provenance {
    let mut h = Sha256::new();
    for sc in grid {
        h.update(format!("{sc:?}\n").as_bytes());
    }
    let mut master_seeds: Vec<u64> = grid.iter().map(|s| s.master_seed).collect();
    master_seeds.sort_unstable();
    master_seeds.dedup();
    Provenance {
        master_seeds,
        config_digest: h.finalize().iter().map(|b| format!("{b:02x}")).collect(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn run_jobs(grid: &[ScenarioConfig], jobs: &[(usize, u32)], parallelism: usize) -> Vec<Result<RunResult>> {
    let run = |&(i, rep): &(usize, u32)| run_single(&grid[i], rep);
    #[cfg(feature = "parallel")]
    if parallelism > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(parallelism).build() {
            return pool.install(|| jobs.par_iter().map(run).collect());
        }
    }
    let _ = parallelism;
    jobs.iter().map(run).collect()
}

/// Runs every grid point for its configured replicates and aggregates them.
/// The result does not depend on `parallelism`.
pub fn run_sweep(grid: &[ScenarioConfig], parallelism: usize) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(SimError::config("sweep", "the scenario grid is empty"));
    }
    if parallelism == 0 {
        return Err(SimError::config("parallelism", "must be at least 1"));
    }
    for sc in grid {
        sc.validate().map_err(|e| SimError::Scenario {
            scenario: sc.key().to_string(),
            source: Box::new(e),
        })?;
    }

    let jobs: Vec<(usize, u32)> = grid
        .iter()
        .enumerate()
        .flat_map(|(i, sc)| (0..sc.replicates).map(move |r| (i, r)))
        .collect();
    let outcomes = run_jobs(grid, &jobs, parallelism);

    let mut runs = Vec::with_capacity(jobs.len());
    for (&(i, _), outcome) in jobs.iter().zip(outcomes) {
        runs.push(outcome.map_err(|e| SimError::Scenario {
            scenario: grid[i].key().to_string(),
            source: Box::new(e),
        })?);
    }

    let mut rows = Vec::with_capacity(grid.len());
    let mut offset = 0;
    for sc in grid {
        let n = sc.replicates as usize;
        let mut acc = KpiAccumulator::default();
        runs[offset..offset + n].iter().for_each(|r| acc.push(r));
        rows.push(AggregateRow::from_accumulator(sc.key(), &acc)?);
        offset += n;
    }

    Ok(SweepResult {
        rows,
        runs,
        provenance: provenance(grid),
    })
}
