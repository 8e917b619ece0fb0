//! # udnsim
//!
//! Deterministic downlink system-level simulator for handover studies in
//! ultra-dense 5G networks.
//!
//! A run deploys gNBs uniformly over a square arena, moves one TU along a
//! straight route, evaluates the serving and best-candidate SINR every 10 ms
//! tic, and drives an A3/time-to-trigger handover state machine. Sweeps
//! repeat this over a grid of TTT, gNB density and TU speed with many
//! replicates per grid point and write the KPIs as CSV.
//!
//! Modules:
//! - [`deployment`]: gNB placement
//! - [`radio`]: link budget, per-tic SINR and best candidate
//! - [`mobility`]: TU trajectories
//! - [`handover`]: the triggering state machine
//! - [`metrics`]: handover rate and mean handover SINR
//! - [`runner`], [`config`], [`csv_io`]: orchestration and persistence

pub mod config;
pub mod csv_io;
pub mod deployment;
pub mod error;
pub mod geom;
pub mod handover;
pub mod metrics;
pub mod mobility;
pub mod radio;
pub mod runner;
pub mod seed;

pub use config::{ModelParams, ScenarioConfig, SimConfig, SweepSpec};
pub use csv_io::{read_csv, write_csv, SweepTables};
pub use deployment::{deploy_gnbs, Arena, Gnb, GnbProfile, GnbSet};
pub use error::{Result, SimError};
pub use geom::Point;
pub use handover::{HandoverEvent, HandoverParams, HandoverState, TicOutcome};
pub use metrics::{ho_avg_sinr, handover_rate, AggregateRow, KpiAccumulator, RunResult, ScenarioKey};
pub use mobility::Route;
pub use radio::{best_sinr, noise_power_dbm, pathloss_db, received_power_dbm, sinr_db, LinkEvaluator, LinkSample, RadioParams};
pub use runner::{run_single, run_sweep, run_trace, RunTrace, SweepResult};
