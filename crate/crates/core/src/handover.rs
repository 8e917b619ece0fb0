//! A3-event handover triggering with time-to-trigger, advanced one tic at a time.
//!
//! Per tic, with the TU attached and no execution hold pending, the A3 entry
//! condition is
//!
//! ```text
//! target != serving
//!   && best_sinr > sinr_min
//!   && best_sinr - avg_sinr + cio(target) - cio(serving) > hys
//! ```
//!
//! where `avg_sinr` is the mean of the previous `window_len` serving-SINR
//! samples. The condition must hold for `ttt_tics` consecutive tics toward the
//! same target; any failing tic or change of target restarts the count.
//! A completed handover clears the averaging window and starts an execution
//! hold during which nothing triggers.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::radio::LinkSample;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverParams {
    pub ttt_tics: u32,
    pub hys_db: f64,
    pub sinr_min_db: f64,
    pub exec_hold_tics: u32,
    pub window_len: usize,
    /// Cell individual offsets by gNB id; absent ids use 0 dB.
    pub cio_db: BTreeMap<usize, f64>,
    /// Feed serving-SINR samples taken during the execution hold into the averaging window.
    pub measure_during_exec: bool,
}

impl Default for HandoverParams {
    fn default() -> Self {
        HandoverParams {
            ttt_tics: 1,
            hys_db: 3.0,
            sinr_min_db: -7.0,
            exec_hold_tics: 25,
            window_len: 10,
            cio_db: BTreeMap::new(),
            measure_during_exec: false,
        }
    }
}

impl HandoverParams {
    pub fn with_ttt(ttt_tics: u32) -> Self {
        HandoverParams {
            ttt_tics,
            ..Default::default()
        }
    }

    pub fn cio(&self, gnb: usize) -> f64 {
        self.cio_db.get(&gnb).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ttt_tics == 0 {
            return Err(SimError::config("ttt_tics", "must be at least 1"));
        }
        if self.window_len == 0 {
            return Err(SimError::config("handover.window_len", "must be at least 1"));
        }
        if !self.hys_db.is_finite() {
            return Err(SimError::config("handover.hys_db", "must be finite"));
        }
        if !self.sinr_min_db.is_finite() {
            return Err(SimError::config("handover.sinr_min_db", "must be finite"));
        }
        if let Some((id, _)) = self.cio_db.iter().find(|(_, v)| !v.is_finite()) {
            return Err(SimError::config(format!("handover.cio_db.{id}"), "must be finite"));
        }
        Ok(())
    }
}

/// A completed handover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandoverEvent {
    pub tic: u32,
    pub from_gnb: usize,
    pub to_gnb: usize,
    /// Best candidate SINR at the completion tic.
    pub best_sinr_db: f64,
}

/// What a tic did to the state machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TicOutcome {
    /// The TU had no serving gNB and attached to the best one. Not a handover.
    Attached(usize),
    /// No serving link this tic.
    Outage,
    /// Execution hold in progress; no triggering.
    ExecHold,
    /// Normal measurement tic without a completed handover.
    Measured,
    Handover(HandoverEvent),
}

impl TicOutcome {
    pub fn event(&self) -> Option<&HandoverEvent> {
        match self {
            TicOutcome::Handover(ev) => Some(ev),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HandoverState {
    pub serving_gnb: Option<usize>,
    pub ho_timer: u32,
    pub ho_trigger: bool,
    pub exec_remaining: u32,
    pub sinr_window: VecDeque<f64>,
    pub pending_target: Option<usize>,
    pub ho_times: u32,
    pub outage_tics: u32,
    last_tic: Option<u32>,
}

impl HandoverState {
    /// Unattached state; the first sample with a reachable gNB attaches the TU.
    pub fn new() -> Self {
        Self::default()
    }

    /// State already attached to `serving` with a pre-filled window, as if `last_tic` was just processed.
    pub fn attached(serving: usize, window: impl IntoIterator<Item = f64>, last_tic: u32) -> Self {
        HandoverState {
            serving_gnb: Some(serving),
            sinr_window: window.into_iter().collect(),
            last_tic: Some(last_tic),
            ..Default::default()
        }
    }

    pub fn last_tic(&self) -> Option<u32> {
        self.last_tic
    }

    /// Mean of the window once it holds exactly `window_len` samples.
    pub fn avg_sinr(&self, window_len: usize) -> Option<f64> {
        if window_len == 0 || self.sinr_window.len() != window_len {
            return None;
        }
        Some(self.sinr_window.iter().sum::<f64>() / window_len as f64)
    }

    fn push_sample(&mut self, sinr_db: f64, window_len: usize) {
        while self.sinr_window.len() >= window_len {
            self.sinr_window.pop_front();
        }
        self.sinr_window.push_back(sinr_db);
    }

    fn reset_trigger(&mut self) {
        self.ho_timer = 0;
        self.ho_trigger = false;
    }

    fn drop_link(&mut self) {
        self.serving_gnb = None;
        self.reset_trigger();
        self.pending_target = None;
        self.exec_remaining = 0;
        self.sinr_window.clear();
        self.outage_tics += 1;
    }

    /// Advances the state machine by one tic.
    pub fn step(&mut self, sample: &LinkSample, params: &HandoverParams) -> Result<TicOutcome> {
        if let Some(prev) = self.last_tic {
            if prev.checked_add(1) != Some(sample.tic) {
                return Err(SimError::Domain(format!(
                    "sample tic {} does not follow tic {prev}",
                    sample.tic
                )));
            }
        }
        self.last_tic = Some(sample.tic);

        let Some(serving) = self.serving_gnb else {
            return Ok(match sample.best_gnb {
                Some(gnb) => {
                    self.serving_gnb = Some(gnb);
                    self.reset_trigger();
                    self.pending_target = None;
                    self.sinr_window.clear();
                    TicOutcome::Attached(gnb)
                }
                None => {
                    self.outage_tics += 1;
                    TicOutcome::Outage
                }
            });
        };

        let Some(serving_sinr) = sample.serving_sinr_db else {
            self.drop_link();
            return Ok(TicOutcome::Outage);
        };

        if self.exec_remaining > 0 {
            self.exec_remaining -= 1;
            if params.measure_during_exec {
                self.push_sample(serving_sinr, params.window_len);
            }
            return Ok(TicOutcome::ExecHold);
        }

        let avg = self.avg_sinr(params.window_len);
        let a3_target = match (sample.best_gnb, sample.best_sinr_db, avg) {
            (Some(target), Some(best), Some(avg))
                if target != serving
                    && best > params.sinr_min_db
                    && best - avg + params.cio(target) - params.cio(serving) > params.hys_db =>
            {
                Some((target, best))
            }
            _ => None,
        };
        self.push_sample(serving_sinr, params.window_len);

        match a3_target {
            Some((target, best)) if self.pending_target.is_none_or(|p| p == target) => {
                self.pending_target = Some(target);
                self.ho_trigger = true;
                self.ho_timer += 1;
                if self.ho_timer >= params.ttt_tics {
                    let event = HandoverEvent {
                        tic: sample.tic,
                        from_gnb: serving,
                        to_gnb: target,
                        best_sinr_db: best,
                    };
                    self.serving_gnb = Some(target);
                    self.exec_remaining = params.exec_hold_tics;
                    self.ho_times += 1;
                    self.reset_trigger();
                    self.pending_target = None;
                    self.sinr_window.clear();
                    return Ok(TicOutcome::Handover(event));
                }
            }
            Some((target, _)) => {
                // target changed mid-count
                self.reset_trigger();
                self.pending_target = Some(target);
            }
            None => {
                self.reset_trigger();
                self.pending_target = None;
            }
        }
        Ok(TicOutcome::Measured)
    }

    /// Checks the structural invariants of the state machine.
    pub fn invariants_hold(&self, params: &HandoverParams) -> bool {
        self.ho_timer <= params.ttt_tics
            && self.ho_trigger == (self.ho_timer > 0)
            && (self.exec_remaining == 0 || (self.ho_timer == 0 && !self.ho_trigger))
            && self.sinr_window.len() <= params.window_len
    }
}
