//! Run-level and aggregate KPIs: handover rate and mean handover SINR.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Identity of one grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioKey {
    pub case: String,
    pub den_gnb: u32,
    pub ttt_tics: u32,
    pub velocity_kmh: f64,
}

impl fmt::Display for ScenarioKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "case={} den_gnb={} ttt={} v={}km/h",
            self.case, self.den_gnb, self.ttt_tics, self.velocity_kmh
        )
    }
}

/// KPIs from one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub scenario: ScenarioKey,
    pub replicate: u32,
    pub seed: u64,
    pub ho_times: u32,
    /// Best SINR at each completed handover, in completion order.
    pub ho_event_sinrs: Vec<f64>,
    pub outage_tics: u32,
    /// Mean serving SINR over tics with a serving link; NaN if there were none.
    pub mean_serving_sinr_db: f64,
}

impl RunResult {
    /// Mean of this replicate's handover SINRs, NaN without handovers.
    pub fn ho_avg_sinr_db(&self) -> f64 {
        mean_or_nan(&self.ho_event_sinrs)
    }
}

fn mean_or_nan(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Mean number of completed handovers per replicate.
pub fn handover_rate(results: &[RunResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(SimError::Domain("handover rate of an empty replicate set".into()));
    }
    let total: u64 = results.iter().map(|r| u64::from(r.ho_times)).sum();
    Ok(total as f64 / results.len() as f64)
}

/// Mean best SINR over every handover event pooled across replicates; NaN when there were none.
pub fn ho_avg_sinr(results: &[RunResult]) -> f64 {
    let mut acc = KpiAccumulator::default();
    for r in results {
        acc.push(r);
    }
    acc.ho_avg_sinr_db()
}

/// Mergeable partial aggregate. Carries event counts so pooled means combine exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KpiAccumulator {
    pub runs: u64,
    pub ho_times: u64,
    pub events: u64,
    pub event_sinr_sum_db: f64,
}

impl KpiAccumulator {
    pub fn push(&mut self, r: &RunResult) {
        self.runs += 1;
        self.ho_times += u64::from(r.ho_times);
        self.events += r.ho_event_sinrs.len() as u64;
        self.event_sinr_sum_db += r.ho_event_sinrs.iter().sum::<f64>();
    }

    pub fn merge(self, other: KpiAccumulator) -> KpiAccumulator {
        KpiAccumulator {
            runs: self.runs + other.runs,
            ho_times: self.ho_times + other.ho_times,
            events: self.events + other.events,
            event_sinr_sum_db: self.event_sinr_sum_db + other.event_sinr_sum_db,
        }
    }

    pub fn mean_ho_rate(&self) -> Option<f64> {
        (self.runs > 0).then(|| self.ho_times as f64 / self.runs as f64)
    }

    pub fn ho_avg_sinr_db(&self) -> f64 {
        if self.events == 0 {
            f64::NAN
        } else {
            self.event_sinr_sum_db / self.events as f64
        }
    }
}

/// One line of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub scenario: ScenarioKey,
    pub replicates: u32,
    pub mean_ho_rate: f64,
    pub ho_avg_sinr_db: f64,
    /// Mean handover rate below one, reported as a handover failure.
    pub failure_flag: bool,
}

impl AggregateRow {
    pub fn from_accumulator(scenario: ScenarioKey, acc: &KpiAccumulator) -> Result<Self> {
        let mean_ho_rate = acc
            .mean_ho_rate()
            .ok_or_else(|| SimError::Domain(format!("no replicates for {scenario}")))?;
        Ok(AggregateRow {
            scenario,
            replicates: acc.runs as u32,
            mean_ho_rate,
            ho_avg_sinr_db: acc.ho_avg_sinr_db(),
            failure_flag: mean_ho_rate < 1.0,
        })
    }

    pub fn from_runs(scenario: ScenarioKey, runs: &[RunResult]) -> Result<Self> {
        let mut acc = KpiAccumulator::default();
        runs.iter().for_each(|r| acc.push(r));
        Self::from_accumulator(scenario, &acc)
    }
}
