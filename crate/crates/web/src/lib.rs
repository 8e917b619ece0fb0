//! Browser bindings for the simulator. Every exported function takes plain
//! numbers and strings and returns a JSON document for the page script.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use udnsim::config::ScenarioConfig;
use udnsim::runner::topology;
use udnsim::{run_sweep, run_trace, SimError};

#[derive(Serialize)]
pub struct GnbView {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

#[derive(Serialize)]
pub struct LayoutView {
    pub width_m: f64,
    pub height_m: f64,
    pub coverage_m: f64,
    pub gnbs: Vec<GnbView>,
    pub route_start: [f64; 2],
    pub route_end: [f64; 2],
    pub travelled_end: [f64; 2],
}

#[derive(Serialize)]
pub struct EventView {
    pub tic: u32,
    pub from: usize,
    pub to: usize,
    pub sinr_db: f64,
}

#[derive(Serialize)]
pub struct TraceView {
    pub layout: LayoutView,
    /// Decimated per-tic series, one entry every `stride` tics.
    pub stride: u32,
    pub tic: Vec<u32>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub serving: Vec<Option<usize>>,
    pub serving_sinr_db: Vec<Option<f64>>,
    pub best_sinr_db: Vec<Option<f64>>,
    pub events: Vec<EventView>,
    pub ho_times: u32,
    pub outage_tics: u32,
}

#[derive(Serialize)]
pub struct CurvePoint {
    pub ttt: u32,
    pub mean_ho_rate: f64,
    /// `None` when no replicate handed over.
    pub ho_avg_sinr_db: Option<f64>,
    pub failure_flag: bool,
}

fn scenario(case: &str, den_gnb: u32, ttt: u32, velocity_kmh: f64, seed: u64) -> ScenarioConfig {
    let mut sc = ScenarioConfig::new(case, den_gnb, ttt, velocity_kmh);
    sc.master_seed = seed;
    sc
}

/// gNB positions and route geometry of one replicate.
pub fn layout_view(case: &str, den_gnb: u32, velocity_kmh: f64, seed: u64, replicate: u32) -> Result<LayoutView, SimError> {
    let sc = scenario(case, den_gnb, 1, velocity_kmh, seed);
    sc.validate()?;
    let gnbs = topology(&sc, replicate)?;
    let route = sc.route()?;
    let end = route.position_at(route.duration_tics)?;
    Ok(LayoutView {
        width_m: sc.model.arena.width_m,
        height_m: sc.model.arena.height_m,
        coverage_m: gnbs.profile.coverage_m,
        gnbs: gnbs
            .gnbs()
            .iter()
            .map(|g| GnbView {
                id: g.id,
                x: g.position.x,
                y: g.position.y,
            })
            .collect(),
        route_start: [route.start.x, route.start.y],
        route_end: [route.end.x, route.end.y],
        travelled_end: [end.x, end.y],
    })
}

/// One replicate with its SINR series and handover events.
pub fn trace_view(
    case: &str,
    den_gnb: u32,
    ttt: u32,
    velocity_kmh: f64,
    seed: u64,
    replicate: u32,
    stride: u32,
) -> Result<TraceView, SimError> {
    let stride = stride.max(1);
    let sc = scenario(case, den_gnb, ttt, velocity_kmh, seed);
    let trace = run_trace(&sc, replicate)?;
    let layout = layout_view(case, den_gnb, velocity_kmh, seed, replicate)?;
    let kept: Vec<_> = trace.tics.iter().filter(|t| t.tic % stride == 0).collect();
    Ok(TraceView {
        layout,
        stride,
        tic: kept.iter().map(|t| t.tic).collect(),
        x: kept.iter().map(|t| t.position.x).collect(),
        y: kept.iter().map(|t| t.position.y).collect(),
        serving: kept.iter().map(|t| t.serving_gnb).collect(),
        serving_sinr_db: kept.iter().map(|t| t.serving_sinr_db).collect(),
        best_sinr_db: kept.iter().map(|t| t.best_sinr_db).collect(),
        events: trace
            .events
            .iter()
            .map(|e| EventView {
                tic: e.tic,
                from: e.from_gnb,
                to: e.to_gnb,
                sinr_db: e.best_sinr_db,
            })
            .collect(),
        ho_times: trace.result.ho_times,
        outage_tics: trace.result.outage_tics,
    })
}

/// Handover rate and mean handover SINR for TTT 1..=12.
pub fn ttt_curve_points(case: &str, den_gnb: u32, velocity_kmh: f64, replicates: u32, seed: u64) -> Result<Vec<CurvePoint>, SimError> {
    let grid: Vec<ScenarioConfig> = (1..=12)
        .map(|ttt| {
            let mut sc = scenario(case, den_gnb, ttt, velocity_kmh, seed);
            sc.replicates = replicates;
            sc
        })
        .collect();
    let res = run_sweep(&grid, 1)?;
    Ok(res
        .rows
        .iter()
        .map(|r| CurvePoint {
            ttt: r.scenario.ttt_tics,
            mean_ho_rate: r.mean_ho_rate,
            ho_avg_sinr_db: (!r.ho_avg_sinr_db.is_nan()).then_some(r.ho_avg_sinr_db),
            failure_flag: r.failure_flag,
        })
        .collect())
}

fn to_js<T: Serialize>(value: Result<T, SimError>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn layout(case: &str, den_gnb: u32, velocity_kmh: f64, seed: u64, replicate: u32) -> Result<String, JsError> {
    to_js(layout_view(case, den_gnb, velocity_kmh, seed, replicate))
}

#[wasm_bindgen]
pub fn trace(case: &str, den_gnb: u32, ttt: u32, velocity_kmh: f64, seed: u64, replicate: u32, stride: u32) -> Result<String, JsError> {
    to_js(trace_view(case, den_gnb, ttt, velocity_kmh, seed, replicate, stride))
}

#[wasm_bindgen]
pub fn ttt_curve(case: &str, den_gnb: u32, velocity_kmh: f64, replicates: u32, seed: u64) -> Result<String, JsError> {
    to_js(ttt_curve_points(case, den_gnb, velocity_kmh, replicates, seed))
}
