//! Test-side oracles and property checks shared by the integration targets.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use udnsim::metrics::KpiAccumulator;
use udnsim::*;

pub type Check = std::result::Result<(), String>;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn finish(r: std::result::Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Check {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// Link budget, written out from the published formulas
// ---------------------------------------------------------------------------

pub fn oracle_pathloss_db(d_m: f64) -> f64 {
    let d_km = d_m.max(1.0) / 1000.0;
    128.1 + 37.6 * d_km.log10()
}

pub fn oracle_noise_dbm(bandwidth_hz: f64, nf_db: f64) -> f64 {
    -174.0 + 10.0 * bandwidth_hz.log10() + nf_db
}

/// Received powers in mW of every gNB within 300 m, in input order.
fn oracle_powers(gnbs: &[(f64, f64)], tu: (f64, f64)) -> Vec<Option<f64>> {
    gnbs.iter()
        .map(|&(x, y)| {
            let d = ((x - tu.0).powi(2) + (y - tu.1).powi(2)).sqrt();
            (d <= 300.0).then(|| 10f64.powf((30.0 + 15.0 - oracle_pathloss_db(d)) / 10.0))
        })
        .collect()
}

/// SINR in dB for each gNB as if it were serving; `None` when it does not cover the TU.
pub fn oracle_sinrs(gnbs: &[(f64, f64)], tu: (f64, f64)) -> Vec<Option<f64>> {
    let powers = oracle_powers(gnbs, tu);
    let noise = 10f64.powf(oracle_noise_dbm(10e6, 7.0) / 10.0);
    let total: f64 = powers.iter().flatten().sum();
    powers
        .iter()
        .map(|p| p.map(|p| 10.0 * (p / (total - p + noise)).log10()))
        .collect()
}

// ---------------------------------------------------------------------------
// Scripted handover traces and the reference state machine
// ---------------------------------------------------------------------------

/// `sinr[t][g]` is the SINR of gNB `g` at tic `t` if it were serving; `None` when out of coverage.
#[derive(Debug, Clone)]
pub struct Script {
    pub sinr: Vec<Vec<Option<f64>>>,
}

impl Script {
    pub fn best(&self, t: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (g, v) in self.sinr[t].iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((g, v));
                }
            }
        }
        best
    }

    pub fn sample(&self, t: usize, serving: Option<usize>) -> LinkSample {
        let best = self.best(t);
        LinkSample {
            tic: t as u32,
            serving_sinr_db: serving.and_then(|s| self.sinr[t][s]),
            best_gnb: best.map(|b| b.0),
            best_sinr_db: best.map(|b| b.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceOutput {
    pub ho_times: u32,
    pub event_tics: Vec<u32>,
    pub serving: Vec<Option<usize>>,
}

/// Straight transcription of the triggering pseudocode, one tic at a time:
/// attach when unattached, drop on coverage loss, hold after execution,
/// otherwise compare the best candidate against the mean of the previous
/// samples of the current serving gNB and count consecutive passes toward one target.
pub fn reference(script: &Script, p: &HandoverParams) -> TraceOutput {
    let mut serving: Option<usize> = None;
    let mut history: Vec<f64> = Vec::new();
    let mut ho_timer = 0u32;
    let mut target: Option<usize> = None;
    let mut hold = 0u32;
    let mut out = TraceOutput {
        ho_times: 0,
        event_tics: Vec::new(),
        serving: Vec::new(),
    };

    for t in 0..script.sinr.len() {
        let best = script.best(t);
        match serving {
            None => {
                if let Some((g, _)) = best {
                    serving = Some(g);
                    history.clear();
                    ho_timer = 0;
                    target = None;
                }
            }
            Some(s) => match script.sinr[t][s] {
                None => {
                    serving = None;
                    history.clear();
                    ho_timer = 0;
                    target = None;
                    hold = 0;
                }
                Some(current) if hold > 0 => {
                    hold -= 1;
                    if p.measure_during_exec {
                        history.push(current);
                    }
                }
                Some(current) => {
                    let avg_sinr = if history.len() >= p.window_len {
                        let last = &history[history.len() - p.window_len..];
                        Some(last.iter().sum::<f64>() / p.window_len as f64)
                    } else {
                        None
                    };
                    history.push(current);
                    let (best_gnb, best_sinr) = best.expect("serving gNB is reachable");
                    let best_cio = p.cio_db.get(&best_gnb).copied().unwrap_or(0.0);
                    let current_cio = p.cio_db.get(&s).copied().unwrap_or(0.0);
                    let condition = match avg_sinr {
                        Some(avg_sinr) => {
                            best_gnb != s
                                && best_sinr > p.sinr_min_db
                                && best_sinr - avg_sinr + best_cio - current_cio > p.hys_db
                        }
                        None => false,
                    };
                    if condition {
                        if target.is_none() || target == Some(best_gnb) {
                            ho_timer += 1;
                        } else {
                            ho_timer = 0;
                        }
                        target = Some(best_gnb);
                    } else {
                        ho_timer = 0;
                        target = None;
                    }
                    if ho_timer == p.ttt_tics {
                        serving = Some(best_gnb);
                        hold = p.exec_hold_tics;
                        out.ho_times += 1;
                        out.event_tics.push(t as u32);
                        ho_timer = 0;
                        target = None;
                        history.clear();
                    }
                }
            },
        }
        out.serving.push(serving);
    }
    out
}

/// Runs the library state machine over a script.
pub fn drive(script: &Script, p: &HandoverParams) -> Result<TraceOutput> {
    let mut st = HandoverState::new();
    let mut out = TraceOutput {
        ho_times: 0,
        event_tics: Vec::new(),
        serving: Vec::new(),
    };
    for t in 0..script.sinr.len() {
        let outcome = st.step(&script.sample(t, st.serving_gnb), p)?;
        if let Some(ev) = outcome.event() {
            out.event_tics.push(ev.tic);
        }
        if !st.invariants_hold(p) {
            return Err(SimError::Domain(format!("state invariant broken at tic {t}: {st:?}")));
        }
        out.serving.push(st.serving_gnb);
    }
    out.ho_times = st.ho_times;
    Ok(out)
}

/// SINR values on a 0.5 dB lattice so that ties and exact hysteresis boundaries occur.
fn lattice_sinr() -> impl Strategy<Value = f64> {
    (-30i32..=30).prop_map(|k| f64::from(k) * 0.5)
}

pub fn script_strategy(max_len: usize, max_gnbs: usize, gaps: bool) -> impl Strategy<Value = Script> {
    (1..=max_gnbs, 1..=max_len).prop_flat_map(move |(k, len)| {
        let cell = if gaps {
            prop_oneof![30 => lattice_sinr().prop_map(Some), 1 => Just(None)].boxed()
        } else {
            lattice_sinr().prop_map(Some).boxed()
        };
        // a slowly drifting per-gNB offset makes sustained A3 conditions likely
        let drift = proptest::collection::vec(-0.3f64..0.3, k);
        (proptest::collection::vec(proptest::collection::vec(cell, k), len), drift).prop_map(|(mut sinr, drift)| {
            for (t, row) in sinr.iter_mut().enumerate() {
                for (g, v) in row.iter_mut().enumerate() {
                    if let Some(x) = v {
                        *x = ((*x + drift[g] * t as f64) * 2.0).round() / 2.0;
                    }
                }
            }
            Script { sinr }
        })
    })
}

pub fn params_strategy() -> impl Strategy<Value = HandoverParams> {
    (
        1u32..=12,
        prop_oneof![Just(3.0), Just(0.0), Just(1.5)],
        0u32..=30,
        1usize..=12,
        any::<bool>(),
        proptest::collection::btree_map(0usize..5, prop_oneof![Just(-1.5), Just(1.0), Just(2.5)], 0..3),
    )
        .prop_map(|(ttt, hys, hold, window, mde, cio)| HandoverParams {
            ttt_tics: ttt,
            hys_db: hys,
            exec_hold_tics: hold,
            window_len: window,
            measure_during_exec: mde,
            cio_db: cio,
            ..HandoverParams::default()
        })
}

/// Library and reference agree on `n` random traces of length <= 200.
pub fn check_oracle_equivalence(n: u32) -> Check {
    let mut r = runner(n);
    finish(r.run(&(script_strategy(200, 5, true), params_strategy()), |(script, p)| {
        let got = drive(&script, &p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let want = reference(&script, &p);
        prop_assert_eq!(got, want);
        Ok(())
    }))
}

/// First handover after attach at tic 0 comes no earlier than window + TTT;
/// consecutive handovers are at least hold + window + TTT apart; the counter matches the events.
pub fn check_spacing(n: u32) -> Check {
    let mut r = runner(n);
    let params = params_strategy().prop_map(|mut p| {
        p.measure_during_exec = false;
        p
    });
    finish(r.run(&(script_strategy(200, 5, false), params), |(script, p)| {
        let out = drive(&script, &p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(out.ho_times as usize, out.event_tics.len());
        let warm = p.window_len as u32 + p.ttt_tics;
        if let Some(&first) = out.event_tics.first() {
            prop_assert!(first >= warm, "first handover at {} < {}", first, warm);
        }
        for w in out.event_tics.windows(2) {
            prop_assert!(w[1] - w[0] >= p.exec_hold_tics + warm, "handovers at {} and {}", w[0], w[1]);
        }
        Ok(())
    }))
}

/// A common CIO on every gNB gives the same decisions as no CIO.
pub fn check_cio_neutrality(n: u32) -> Check {
    let mut r = runner(n);
    finish(r.run(
        &(script_strategy(200, 5, true), params_strategy(), -6i32..=6),
        |(script, p, c)| {
            let mut zero = p.clone();
            zero.cio_db.clear();
            let mut flat = p.clone();
            flat.cio_db = (0..5).map(|g| (g, f64::from(c) * 0.5)).collect();
            prop_assert_eq!(
                drive(&script, &zero).map_err(|e| TestCaseError::fail(e.to_string()))?,
                drive(&script, &flat).map_err(|e| TestCaseError::fail(e.to_string()))?
            );
            Ok(())
        },
    ))
}

// ---------------------------------------------------------------------------
// Radio properties
// ---------------------------------------------------------------------------

fn layout(max: usize) -> impl Strategy<Value = (Vec<(f64, f64)>, (f64, f64))> {
    (
        proptest::collection::vec((0.0f64..600.0, 0.0f64..600.0), 1..=max),
        (0.0f64..600.0, 0.0f64..600.0),
    )
}

fn gnb_set(points: &[(f64, f64)]) -> GnbSet {
    let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::new(x, y)).collect();
    GnbSet::from_positions(&pts, GnbProfile::default())
}

fn quiet() -> rand_chacha::ChaCha8Rng {
    <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0)
}

/// The best candidate scores at least as high as every reachable gNB, prefers the
/// lowest id on ties, and agrees with a brute-force evaluation.
pub fn check_best_dominance(n: u32) -> Check {
    let mut r = runner(n);
    finish(r.run(&layout(8), |(points, tu)| {
        let set = gnb_set(&points);
        let params = RadioParams::default();
        let pos = Point::new(tu.0, tu.1);
        let best = best_sinr(pos, &set, &params, &mut quiet());
        let oracle = oracle_sinrs(&points, tu);
        let want = oracle
            .iter()
            .enumerate()
            .filter_map(|(g, v)| v.map(|v| (g, v)))
            .fold(None, |acc: Option<(usize, f64)>, (g, v)| match acc {
                Some((_, b)) if b >= v => acc,
                _ => Some((g, v)),
            });
        match (best, want) {
            (None, None) => {}
            (Some((g, v)), Some((wg, wv))) => {
                for (h, s) in oracle.iter().enumerate() {
                    if let Some(s) = s {
                        let lib = sinr_db(pos, h, &set, &params, &mut quiet()).map_err(|e| TestCaseError::fail(format!("{e:?}")))?;
                        prop_assert!((lib - s).abs() < 1e-9, "gNB {}: {} vs {}", h, lib, s);
                        prop_assert!(v >= lib - 1e-12);
                    }
                }
                prop_assert!((v - wv).abs() < 1e-9);
                // near-ties may resolve either way under rounding
                if g != wg {
                    prop_assert!((oracle[g].unwrap() - wv).abs() < 1e-9, "best {} vs oracle {}", g, wg);
                }
            }
            (got, want) => prop_assert!(false, "best {:?} vs oracle {:?}", got, want),
        }
        Ok(())
    }))
}

/// Adding a gNB never raises the SINR of an existing serving link, and lowers it when the new gNB covers the TU.
pub fn check_interference_monotone(n: u32) -> Check {
    let mut r = runner(n);
    finish(r.run(&(layout(6), (0.0f64..600.0, 0.0f64..600.0)), |((points, tu), extra)| {
        let params = RadioParams::default();
        let pos = Point::new(tu.0, tu.1);
        let before = gnb_set(&points);
        let mut more = points.clone();
        more.push(extra);
        let after = gnb_set(&more);
        let covers = ((extra.0 - tu.0).powi(2) + (extra.1 - tu.1).powi(2)).sqrt() <= 300.0;
        for g in 0..points.len() {
            let (Ok(a), Ok(b)) = (
                sinr_db(pos, g, &before, &params, &mut quiet()),
                sinr_db(pos, g, &after, &params, &mut quiet()),
            ) else {
                continue;
            };
            if covers {
                prop_assert!(b < a, "gNB {}: {} -> {}", g, a, b);
            } else {
                prop_assert_eq!(a, b);
            }
        }
        Ok(())
    }))
}

pub fn check_pathloss_monotone(n: u32) -> Check {
    let mut r = runner(n);
    finish(r.run(&(1.0f64..5000.0, 1.0f64..5000.0), |(a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (pl_lo, pl_hi) = (pathloss_db(lo).unwrap(), pathloss_db(hi).unwrap());
        prop_assert!(pl_lo <= pl_hi);
        prop_assert!((pl_lo - oracle_pathloss_db(lo)).abs() < 1e-9);
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// Aggregation properties
// ---------------------------------------------------------------------------

fn run_results() -> impl Strategy<Value = Vec<RunResult>> {
    proptest::collection::vec(
        (0u32..20).prop_flat_map(|n| {
            (Just(n), proptest::collection::vec(-20.0f64..60.0, n as usize))
        }),
        1..40,
    )
    .prop_map(|runs| {
        runs.into_iter()
            .enumerate()
            .map(|(i, (ho_times, sinrs))| RunResult {
                scenario: ScenarioKey {
                    case: "A".into(),
                    den_gnb: 10,
                    ttt_tics: 1,
                    velocity_kmh: 50.0,
                },
                replicate: i as u32,
                seed: i as u64,
                ho_times,
                ho_event_sinrs: sinrs,
                outage_tics: 0,
                mean_serving_sinr_db: 0.0,
            })
            .collect()
    })
}

fn same_kpi(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

/// Aggregates do not depend on replicate order or on how replicates are split before merging.
pub fn check_aggregation_invariance(n: u32) -> Check {
    let mut r = runner(n);
    finish(r.run(&(run_results(), any::<u64>(), any::<prop::sample::Index>()), |(runs, shuffle, cut)| {
        let key = runs[0].scenario.clone();
        let base = AggregateRow::from_runs(key.clone(), &runs).map_err(|e| TestCaseError::fail(e.to_string()))?;

        let mut perm = runs.clone();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(shuffle);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let shuffled = AggregateRow::from_runs(key.clone(), &perm).map_err(|e| TestCaseError::fail(e.to_string()))?;

        let split = cut.index(perm.len() + 1);
        let mut left = KpiAccumulator::default();
        let mut right = KpiAccumulator::default();
        perm[..split].iter().for_each(|x| left.push(x));
        perm[split..].iter().for_each(|x| right.push(x));
        let merged = AggregateRow::from_accumulator(key, &right.merge(left)).map_err(|e| TestCaseError::fail(e.to_string()))?;

        let events: usize = runs.iter().map(|x| x.ho_event_sinrs.len()).sum();
        let total: u32 = runs.iter().map(|x| x.ho_times).sum();
        for row in [&base, &shuffled, &merged] {
            prop_assert_eq!(row.replicates, runs.len() as u32);
            prop_assert!(same_kpi(row.mean_ho_rate, f64::from(total) / runs.len() as f64));
            prop_assert!(same_kpi(row.ho_avg_sinr_db, base.ho_avg_sinr_db));
            prop_assert_eq!(row.ho_avg_sinr_db.is_nan(), events == 0);
            prop_assert_eq!(row.failure_flag, row.mean_ho_rate < 1.0);
        }
        Ok(())
    }))
}

// ---------------------------------------------------------------------------
// Mobility, configuration and seeding
// ---------------------------------------------------------------------------

/// Every position lies on the segment and consecutive positions are one step apart until the end is reached.
pub fn check_mobility(n: u32) -> Check {
    let mut r = runner(n);
    let pt = (0.0f64..1000.0, 0.0f64..1000.0);
    finish(r.run(&(pt.clone(), pt, 1.0f64..120.0, 1u32..400), |(s, e, v, dur)| {
        let mut route = Route::new(Point::new(s.0, s.1), Point::new(e.0, e.1), v);
        route.duration_tics = dur;
        let len = route.length_m();
        prop_assume!(len > 1e-6);
        let step = v / 3.6 * 0.01;
        let mut prev = route.position_at(0).unwrap();
        prop_assert!(prev.distance_to(route.start) < 1e-9);
        for t in 1..=dur {
            let p = route.position_at(t).unwrap();
            let along = p.distance_to(route.start);
            let off = (along + p.distance_to(route.end) - len).abs();
            prop_assert!(off < 1e-6, "tic {} off segment by {}", t, off);
            let travelled = prev.distance_to(p);
            let expected = (f64::from(t) * step).min(len) - (f64::from(t - 1) * step).min(len);
            prop_assert!((travelled - expected).abs() < 1e-6, "tic {}: moved {} expected {}", t, travelled, expected);
            prev = p;
        }
        prop_assert!(route.position_at(dur + 1).is_err());
        Ok(())
    }))
}

pub fn check_config_round_trip(n: u32) -> Check {
    let mut r = runner(n);
    let strat = (
        0.0f64..10.0,
        0.0f64..6.0,
        0u32..50,
        1usize..20,
        proptest::collection::btree_map(0usize..50, -5.0f64..5.0, 0..4),
        proptest::collection::vec(1u32..13, 1..5),
        proptest::collection::vec(1.0f64..120.0, 1..4),
        1u32..200,
        0u64..=i64::MAX as u64,
        any::<bool>(),
    );
    finish(r.run(&strat, |(sigma, hys, hold, window, cio, ttts, vs, reps, seed, fixed)| {
        let mut cfg = SimConfig::default();
        cfg.model.radio.shadowing_sigma_db = sigma;
        cfg.model.handover.hys_db = hys;
        cfg.model.handover.exec_hold_tics = hold;
        cfg.model.handover.window_len = window;
        cfg.model.handover.cio_db = cio;
        cfg.sweep.ttt_tics = ttts;
        cfg.sweep.velocities_kmh = vs;
        cfg.sweep.replicates = reps;
        cfg.sweep.master_seed = seed;
        cfg.sweep.fixed_topology = fixed;
        let text = cfg.to_toml_string().map_err(|e| TestCaseError::fail(e.to_string()))?;
        let back = SimConfig::from_toml_str(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back, cfg);
        Ok(())
    }))
}

/// A run's result depends only on its own scenario, replicate and master seed.
pub fn check_seed_isolation(n: u32) -> Check {
    let mut r = runner(n);
    let strat = (0u32..50, 1u32..13, 0u32..3, 0u64..1000);
    finish(r.run(&strat, |(rep, ttt, extra, seed)| {
        let mut sc = ScenarioConfig::new("B", 10, ttt, 50.0);
        sc.model.duration_tics = 150;
        sc.master_seed = seed;
        sc.replicates = rep + 1 + extra;
        let alone = run_single(&sc, rep).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut other = sc.clone();
        other.ttt_tics = ttt % 12 + 1;
        let grid = vec![other, sc.clone()];
        let swept = run_sweep(&grid, 1).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let offset = grid[0].replicates as usize;
        prop_assert_eq!(format!("{:?}", swept.runs[offset + rep as usize]), format!("{:?}", alone));
        Ok(())
    }))
}
