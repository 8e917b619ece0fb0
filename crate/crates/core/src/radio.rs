//! Downlink link budget and SINR evaluation.
//!
//! All absolute powers are dBm; interference sums happen in linear milliwatts.
//! A gNB takes part in a measurement, as candidate or interferer, only when it
//! lies within its coverage radius of the TU.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::deployment::{Gnb, GnbSet};
use crate::error::{Result, SimError};
use crate::geom::Point;

/// Thermal noise density at room temperature.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Distances below this are clamped before evaluating the pathloss.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Metadata only: the pathloss model has no frequency term.
    pub carrier_freq_ghz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub rx_antenna_gain_dbi: f64,
    /// Standard deviation of the per-link, per-tic log-normal shadowing draw.
    pub shadowing_sigma_db: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            carrier_freq_ghz: 6.0,
            bandwidth_hz: 10e6,
            noise_figure_db: 7.0,
            rx_antenna_gain_dbi: 0.0,
            shadowing_sigma_db: 0.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(SimError::config("radio.bandwidth_hz", "must be positive"));
        }
        if !(self.noise_figure_db >= 0.0 && self.noise_figure_db.is_finite()) {
            return Err(SimError::config("radio.noise_figure_db", "must be non-negative"));
        }
        if !(self.shadowing_sigma_db >= 0.0 && self.shadowing_sigma_db.is_finite()) {
            return Err(SimError::config("radio.shadowing_sigma_db", "must be non-negative"));
        }
        if !self.rx_antenna_gain_dbi.is_finite() {
            return Err(SimError::config("radio.rx_antenna_gain_dbi", "must be finite"));
        }
        if !(self.carrier_freq_ghz > 0.0 && self.carrier_freq_ghz.is_finite()) {
            return Err(SimError::config("radio.carrier_freq_ghz", "must be positive"));
        }
        Ok(())
    }
}

/// Radio measurements for one tic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSample {
    pub tic: u32,
    /// SINR w.r.t. the serving gNB; `None` when there is no serving gNB in coverage.
    pub serving_sinr_db: Option<f64>,
    /// Best candidate; `None` iff no gNB covers the TU.
    pub best_gnb: Option<usize>,
    pub best_sinr_db: Option<f64>,
}

/// The serving gNB does not cover the TU.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("gNB {0} does not cover the TU")]
pub struct OutOfCoverage(pub usize);

/// Macro-cell pathloss `128.1 + 37.6 log10(d)` with `d` in kilometers.
pub fn pathloss_db(distance_m: f64) -> Result<f64> {
    if distance_m.is_nan() || distance_m <= 0.0 || !distance_m.is_finite() {
        return Err(SimError::Domain(format!(
            "pathloss distance must be positive and finite, got {distance_m}"
        )));
    }
    Ok(128.1 + 37.6 * (distance_m / 1000.0).log10())
}

pub fn noise_power_dbm(params: &RadioParams) -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + 10.0 * params.bandwidth_hz.log10() + params.noise_figure_db
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

fn shadowing(sigma_db: f64) -> Option<Normal<f64>> {
    (sigma_db > 0.0).then(|| Normal::new(0.0, sigma_db).expect("sigma validated non-negative"))
}

fn deterministic_rx_dbm(gnb: &Gnb, set: &GnbSet, tu_pos: Point, params: &RadioParams) -> f64 {
    let d = tu_pos.distance_to(gnb.position).max(MIN_DISTANCE_M);
    let pl = pathloss_db(d).expect("clamped distance is positive");
    set.profile.tx_power_dbm + set.profile.antenna_gain_dbi + params.rx_antenna_gain_dbi - pl
}

/// Received power from `gnb` at `tu_pos`, including one shadowing draw when enabled.
pub fn received_power_dbm<R: Rng + ?Sized>(
    gnb: &Gnb,
    set: &GnbSet,
    tu_pos: Point,
    params: &RadioParams,
    rng: &mut R,
) -> f64 {
    let base = deterministic_rx_dbm(gnb, set, tu_pos, params);
    match shadowing(params.shadowing_sigma_db) {
        Some(normal) => base - normal.sample(rng),
        None => base,
    }
}

/// Returns true when `gnb` covers `tu_pos`.
#[inline]
pub fn reachable(gnb: &Gnb, set: &GnbSet, tu_pos: Point) -> bool {
    tu_pos.distance_sq(gnb.position) <= set.profile.coverage_m * set.profile.coverage_m
}

/// Evaluates links for one TU position. Holds scratch buffers so the per-tic
/// hot loop does not allocate.
#[derive(Debug, Clone)]
pub struct LinkEvaluator {
    params: RadioParams,
    noise_mw: f64,
    shadow: Option<Normal<f64>>,
    /// (gNB id, received power in mW) for every reachable gNB, ascending id.
    powers: Vec<(usize, f64)>,
}

impl LinkEvaluator {
    pub fn new(params: RadioParams) -> Self {
        LinkEvaluator {
            noise_mw: dbm_to_mw(noise_power_dbm(&params)),
            shadow: shadowing(params.shadowing_sigma_db),
            params,
            powers: Vec::new(),
        }
    }

    pub fn params(&self) -> &RadioParams {
        &self.params
    }

    /// Refreshes the reachable set and received powers at `tu_pos`.
    /// Draws one shadowing sample per reachable gNB in id order.
    pub fn observe<R: Rng + ?Sized>(&mut self, set: &GnbSet, tu_pos: Point, rng: &mut R) {
        self.powers.clear();
        for gnb in set.gnbs() {
            if !reachable(gnb, set, tu_pos) {
                continue;
            }
            let mut dbm = deterministic_rx_dbm(gnb, set, tu_pos, &self.params);
            if let Some(normal) = &self.shadow {
                dbm -= normal.sample(rng);
            }
            self.powers.push((gnb.id, dbm_to_mw(dbm)));
        }
    }

    /// Reachable gNBs and their received powers (mW) from the last observation.
    pub fn reachable_powers(&self) -> &[(usize, f64)] {
        &self.powers
    }

    fn total_mw(&self) -> f64 {
        self.powers.iter().map(|&(_, p)| p).sum()
    }

    /// SINR treating `serving` as the desired link and every other reachable gNB as interference.
    pub fn sinr_db(&self, serving: usize) -> std::result::Result<f64, OutOfCoverage> {
        let &(_, p) = self
            .powers
            .iter()
            .find(|&&(id, _)| id == serving)
            .ok_or(OutOfCoverage(serving))?;
        let interference = self.total_mw() - p;
        Ok(mw_to_dbm(p / (interference + self.noise_mw)))
    }

    /// Highest candidate SINR over reachable gNBs; ties go to the lowest id.
    pub fn best(&self) -> Option<(usize, f64)> {
        let total = self.total_mw();
        let mut best: Option<(usize, f64)> = None;
        for &(id, p) in &self.powers {
            let ratio = p / (total - p + self.noise_mw);
            if best.is_none_or(|(_, r)| ratio > r) {
                best = Some((id, ratio));
            }
        }
        best.map(|(id, ratio)| (id, mw_to_dbm(ratio)))
    }

    /// Observes `tu_pos` and packages the serving and best SINR for `tic`.
    pub fn sample<R: Rng + ?Sized>(
        &mut self,
        tic: u32,
        set: &GnbSet,
        tu_pos: Point,
        serving: Option<usize>,
        rng: &mut R,
    ) -> LinkSample {
        self.observe(set, tu_pos, rng);
        let best = self.best();
        LinkSample {
            tic,
            serving_sinr_db: serving.and_then(|s| self.sinr_db(s).ok()),
            best_gnb: best.map(|(id, _)| id),
            best_sinr_db: best.map(|(_, v)| v),
        }
    }
}

/// SINR of the TU w.r.t. `serving`, with every other reachable gNB interfering.
pub fn sinr_db<R: Rng + ?Sized>(
    tu_pos: Point,
    serving: usize,
    gnbs: &GnbSet,
    params: &RadioParams,
    rng: &mut R,
) -> std::result::Result<f64, OutOfCoverage> {
    let mut eval = LinkEvaluator::new(*params);
    eval.observe(gnbs, tu_pos, rng);
    eval.sinr_db(serving)
}

/// Best candidate SINR over all reachable gNBs, or `None` when none covers the TU.
pub fn best_sinr<R: Rng + ?Sized>(
    tu_pos: Point,
    gnbs: &GnbSet,
    params: &RadioParams,
    rng: &mut R,
) -> Option<(usize, f64)> {
    let mut eval = LinkEvaluator::new(*params);
    eval.observe(gnbs, tu_pos, rng);
    eval.best()
}
