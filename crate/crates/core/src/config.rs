//! Scenario configuration and its TOML file form.
//!
//! The file has five sections, all optional, all rejecting unknown keys:
//!
//! ```toml
//! [arena]     # width_m, height_m
//! [radio]     # link budget and gNB profile
//! [handover]  # hysteresis, sinr floor, hold, window, CIOs
//! [mobility]  # tic length, duration, extra named routes
//! [sweep]     # grid axes, replicates, seed, topology mode
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::deployment::{Arena, GnbProfile};
use crate::error::{Result, SimError};
use crate::geom::Point;
use crate::handover::HandoverParams;
use crate::metrics::ScenarioKey;
use crate::mobility::{Route, DEFAULT_DURATION_TICS, DEFAULT_TIC_MS};
use crate::radio::RadioParams;

pub const DEFAULT_MASTER_SEED: u64 = 2023;
pub const DEFAULT_REPLICATES: u32 = 100;

// ============================================================================
// File schema
// ============================================================================

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RadioSection {
    carrier_freq_ghz: f64,
    bandwidth_hz: f64,
    noise_figure_db: f64,
    rx_antenna_gain_dbi: f64,
    shadowing_sigma_db: f64,
    tx_power_dbm: f64,
    antenna_gain_dbi: f64,
    coverage_m: f64,
    gnb_height_m: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        RadioSection::from_parts(&RadioParams::default(), &GnbProfile::default())
    }
}

impl RadioSection {
    fn from_parts(r: &RadioParams, g: &GnbProfile) -> Self {
        RadioSection {
            carrier_freq_ghz: r.carrier_freq_ghz,
            bandwidth_hz: r.bandwidth_hz,
            noise_figure_db: r.noise_figure_db,
            rx_antenna_gain_dbi: r.rx_antenna_gain_dbi,
            shadowing_sigma_db: r.shadowing_sigma_db,
            tx_power_dbm: g.tx_power_dbm,
            antenna_gain_dbi: g.antenna_gain_dbi,
            coverage_m: g.coverage_m,
            gnb_height_m: g.height_m,
        }
    }

    fn radio(&self) -> RadioParams {
        RadioParams {
            carrier_freq_ghz: self.carrier_freq_ghz,
            bandwidth_hz: self.bandwidth_hz,
            noise_figure_db: self.noise_figure_db,
            rx_antenna_gain_dbi: self.rx_antenna_gain_dbi,
            shadowing_sigma_db: self.shadowing_sigma_db,
        }
    }

    fn profile(&self) -> GnbProfile {
        GnbProfile {
            coverage_m: self.coverage_m,
            tx_power_dbm: self.tx_power_dbm,
            antenna_gain_dbi: self.antenna_gain_dbi,
            height_m: self.gnb_height_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct HandoverSection {
    hys_db: f64,
    sinr_min_db: f64,
    exec_hold_tics: u32,
    window_len: usize,
    measure_during_exec: bool,
    /// Keys are gNB ids as strings.
    cio_db: BTreeMap<String, f64>,
}

impl Default for HandoverSection {
    fn default() -> Self {
        HandoverSection::from_params(&HandoverParams::default())
    }
}

impl HandoverSection {
    fn from_params(p: &HandoverParams) -> Self {
        HandoverSection {
            hys_db: p.hys_db,
            sinr_min_db: p.sinr_min_db,
            exec_hold_tics: p.exec_hold_tics,
            window_len: p.window_len,
            measure_during_exec: p.measure_during_exec,
            cio_db: p.cio_db.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    fn params(&self) -> Result<HandoverParams> {
        let mut cio_db = BTreeMap::new();
        for (k, v) in &self.cio_db {
            let id = k
                .parse::<usize>()
                .map_err(|_| SimError::config(format!("handover.cio_db.{k}"), "key must be a gNB id"))?;
            cio_db.insert(id, *v);
        }
        Ok(HandoverParams {
            ttt_tics: 1,
            hys_db: self.hys_db,
            sinr_min_db: self.sinr_min_db,
            exec_hold_tics: self.exec_hold_tics,
            window_len: self.window_len,
            cio_db,
            measure_during_exec: self.measure_during_exec,
        })
    }
}

/// A user-defined straight route referenced from `sweep.cases` by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedRoute {
    pub label: String,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct MobilitySection {
    tic_ms: f64,
    duration_tics: u32,
    routes: Vec<NamedRoute>,
}

impl Default for MobilitySection {
    fn default() -> Self {
        MobilitySection {
            tic_ms: DEFAULT_TIC_MS,
            duration_tics: DEFAULT_DURATION_TICS,
            routes: Vec::new(),
        }
    }
}

/// Grid axes and Monte Carlo settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub cases: Vec<String>,
    pub densities: Vec<u32>,
    pub ttt_tics: Vec<u32>,
    pub velocities_kmh: Vec<f64>,
    pub replicates: u32,
    pub master_seed: u64,
    /// Share one topology per (case, density) across all replicates.
    pub fixed_topology: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            cases: vec!["A".into(), "B".into()],
            densities: vec![10, 20, 30, 40, 50],
            ttt_tics: (1..=12).collect(),
            velocities_kmh: vec![10.0, 20.0, 30.0, 40.0, 50.0],
            replicates: DEFAULT_REPLICATES,
            master_seed: DEFAULT_MASTER_SEED,
            fixed_topology: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ConfigFile {
    arena: Arena,
    radio: RadioSection,
    handover: HandoverSection,
    mobility: MobilitySection,
    sweep: SweepSpec,
}

// ============================================================================
// Runtime configuration
// ============================================================================

/// Physical and protocol parameters shared by every scenario of a sweep.
/// `handover.ttt_tics` is overridden per scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub arena: Arena,
    pub gnb: GnbProfile,
    pub radio: RadioParams,
    pub handover: HandoverParams,
    pub tic_ms: f64,
    pub duration_tics: u32,
    pub routes: Vec<NamedRoute>,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            arena: Arena::default(),
            gnb: GnbProfile::default(),
            radio: RadioParams::default(),
            handover: HandoverParams::default(),
            tic_ms: DEFAULT_TIC_MS,
            duration_tics: DEFAULT_DURATION_TICS,
            routes: Vec::new(),
        }
    }
}

impl ModelParams {
    /// Route for a case label at the given speed.
    pub fn route(&self, case: &str, velocity_kmh: f64) -> Result<Route> {
        let mut route = match case {
            "A" => Route::case_a(velocity_kmh),
            "B" => Route::case_b(velocity_kmh),
            other => {
                let named = self
                    .routes
                    .iter()
                    .find(|r| r.label == other)
                    .ok_or_else(|| SimError::config("case", format!("unknown route label {other:?}")))?;
                Route::new(named.start.into(), named.end.into(), velocity_kmh)
            }
        };
        route.tic_ms = self.tic_ms;
        route.duration_tics = self.duration_tics;
        Ok(route)
    }

    pub fn validate(&self) -> Result<()> {
        self.arena.validate()?;
        self.gnb.validate()?;
        self.radio.validate()?;
        self.handover.validate()?;
        if !(self.tic_ms > 0.0 && self.tic_ms.is_finite()) {
            return Err(SimError::config("mobility.tic_ms", "must be positive"));
        }
        if self.duration_tics == 0 {
            return Err(SimError::config("mobility.duration_tics", "must be at least 1"));
        }
        for (i, r) in self.routes.iter().enumerate() {
            if r.label.is_empty() || r.label.contains(',') {
                return Err(SimError::config(
                    format!("mobility.routes[{i}].label"),
                    "must be non-empty and free of commas",
                ));
            }
            if r.label == "A" || r.label == "B" {
                return Err(SimError::config(
                    format!("mobility.routes[{i}].label"),
                    "A and B are reserved for the built-in cases",
                ));
            }
            for (name, p) in [("start", r.start), ("end", r.end)] {
                if !self.arena.contains(Point::from(p)) {
                    return Err(SimError::config(
                        format!("mobility.routes[{i}].{name}"),
                        "must lie inside the arena",
                    ));
                }
            }
            if r.start == r.end {
                return Err(SimError::config(format!("mobility.routes[{i}]"), "start and end coincide"));
            }
        }
        Ok(())
    }
}

/// One grid point with everything needed to run its replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub case: String,
    pub den_gnb: u32,
    pub ttt_tics: u32,
    pub velocity_kmh: f64,
    pub replicates: u32,
    pub master_seed: u64,
    pub fixed_topology: bool,
    pub model: ModelParams,
}

impl ScenarioConfig {
    /// Default parameters for one grid point.
    pub fn new(case: impl Into<String>, den_gnb: u32, ttt_tics: u32, velocity_kmh: f64) -> Self {
        ScenarioConfig {
            case: case.into(),
            den_gnb,
            ttt_tics,
            velocity_kmh,
            replicates: DEFAULT_REPLICATES,
            master_seed: DEFAULT_MASTER_SEED,
            fixed_topology: false,
            model: ModelParams::default(),
        }
    }

    pub fn key(&self) -> ScenarioKey {
        ScenarioKey {
            case: self.case.clone(),
            den_gnb: self.den_gnb,
            ttt_tics: self.ttt_tics,
            velocity_kmh: self.velocity_kmh,
        }
    }

    pub fn handover_params(&self) -> HandoverParams {
        HandoverParams {
            ttt_tics: self.ttt_tics,
            ..self.model.handover.clone()
        }
    }

    pub fn route(&self) -> Result<Route> {
        self.model.route(&self.case, self.velocity_kmh)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.den_gnb == 0 {
            return Err(SimError::config("den_gnb", "at least one gNB is required"));
        }
        if self.ttt_tics == 0 {
            return Err(SimError::config("ttt_tics", "must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(SimError::config("replicates", "must be at least 1"));
        }
        self.route()?.validate()
    }
}

/// A whole configuration: shared model parameters plus the sweep grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimConfig {
    pub model: ModelParams,
    pub sweep: SweepSpec,
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| SimError::config("config", e.message().to_string()))?;
        let model = ModelParams {
            arena: file.arena,
            gnb: file.radio.profile(),
            radio: file.radio.radio(),
            handover: file.handover.params()?,
            tic_ms: file.mobility.tic_ms,
            duration_tics: file.mobility.duration_tics,
            routes: file.mobility.routes,
        };
        let cfg = SimConfig {
            model,
            sweep: file.sweep,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        let file = ConfigFile {
            arena: self.model.arena,
            radio: RadioSection::from_parts(&self.model.radio, &self.model.gnb),
            handover: HandoverSection::from_params(&self.model.handover),
            mobility: MobilitySection {
                tic_ms: self.model.tic_ms,
                duration_tics: self.model.duration_tics,
                routes: self.model.routes.clone(),
            },
            sweep: self.sweep.clone(),
        };
        toml::to_string(&file).map_err(|e| SimError::config("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let s = &self.sweep;
        for (name, empty) in [
            ("sweep.cases", s.cases.is_empty()),
            ("sweep.densities", s.densities.is_empty()),
            ("sweep.ttt_tics", s.ttt_tics.is_empty()),
            ("sweep.velocities_kmh", s.velocities_kmh.is_empty()),
        ] {
            if empty {
                return Err(SimError::config(name, "must not be empty"));
            }
        }
        if s.replicates == 0 {
            return Err(SimError::config("sweep.replicates", "must be at least 1"));
        }
        if s.master_seed > i64::MAX as u64 {
            return Err(SimError::config("sweep.master_seed", "must fit in a signed 64-bit integer"));
        }
        if s.densities.contains(&0) {
            return Err(SimError::config("sweep.densities", "densities must be at least 1"));
        }
        if s.ttt_tics.contains(&0) {
            return Err(SimError::config("sweep.ttt_tics", "TTT must be at least 1 tic"));
        }
        if s.velocities_kmh.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(SimError::config("sweep.velocities_kmh", "speeds must be positive"));
        }
        for case in &s.cases {
            self.model.route(case, 1.0)?;
        }
        Ok(())
    }

    /// Expands the grid in case, density, TTT, velocity order.
    pub fn scenarios(&self) -> Vec<ScenarioConfig> {
        let s = &self.sweep;
        let mut out = Vec::with_capacity(
            s.cases.len() * s.densities.len() * s.ttt_tics.len() * s.velocities_kmh.len(),
        );
        for case in &s.cases {
            for &den_gnb in &s.densities {
                for &ttt_tics in &s.ttt_tics {
                    for &velocity_kmh in &s.velocities_kmh {
                        out.push(ScenarioConfig {
                            case: case.clone(),
                            den_gnb,
                            ttt_tics,
                            velocity_kmh,
                            replicates: s.replicates,
                            master_seed: s.master_seed,
                            fixed_topology: s.fixed_topology,
                            model: self.model.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}
