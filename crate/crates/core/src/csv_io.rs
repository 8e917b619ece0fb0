//! `aggregate.csv` and `runs.csv` writers and readers.
//!
//! Floats carry four decimals; missing values are written as `nan`.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::runner::SweepResult;

pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const RUNS_FILE: &str = "runs.csv";

pub const AGGREGATE_HEADER: [&str; 8] = [
    "case",
    "den_gnb",
    "ttt_tics",
    "velocity_kmh",
    "replicates",
    "mean_ho_rate",
    "ho_avg_sinr_db",
    "failure_flag",
];

pub const RUNS_HEADER: [&str; 10] = [
    "case",
    "den_gnb",
    "ttt_tics",
    "velocity_kmh",
    "replicate",
    "seed",
    "ho_times",
    "ho_avg_sinr_db",
    "outage_tics",
    "mean_serving_sinr_db",
];

/// Formats a float with four decimals, `nan` for missing values.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".to_string()
    } else {
        s
    }
}

/// Parses a cell written by [`fmt_float`].
pub fn parse_float(s: &str) -> Option<f64> {
    if s.eq_ignore_ascii_case("nan") {
        Some(f64::NAN)
    } else {
        s.parse().ok()
    }
}

/// One parsed line of `aggregate.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRecord {
    pub case: String,
    pub den_gnb: u32,
    pub ttt_tics: u32,
    pub velocity_kmh: f64,
    pub replicates: u32,
    pub mean_ho_rate: f64,
    pub ho_avg_sinr_db: f64,
    pub failure_flag: bool,
}

impl AggregateRecord {
    fn cells(&self) -> [String; 8] {
        [
            self.case.clone(),
            self.den_gnb.to_string(),
            self.ttt_tics.to_string(),
            fmt_float(self.velocity_kmh),
            self.replicates.to_string(),
            fmt_float(self.mean_ho_rate),
            fmt_float(self.ho_avg_sinr_db),
            self.failure_flag.to_string(),
        ]
    }
}

/// One parsed line of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub case: String,
    pub den_gnb: u32,
    pub ttt_tics: u32,
    pub velocity_kmh: f64,
    pub replicate: u32,
    pub seed: u64,
    pub ho_times: u32,
    pub ho_avg_sinr_db: f64,
    pub outage_tics: u32,
    pub mean_serving_sinr_db: f64,
}

impl RunRecord {
    fn cells(&self) -> [String; 10] {
        [
            self.case.clone(),
            self.den_gnb.to_string(),
            self.ttt_tics.to_string(),
            fmt_float(self.velocity_kmh),
            self.replicate.to_string(),
            self.seed.to_string(),
            self.ho_times.to_string(),
            fmt_float(self.ho_avg_sinr_db),
            self.outage_tics.to_string(),
            fmt_float(self.mean_serving_sinr_db),
        ]
    }
}

/// The contents of a results directory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTables {
    pub aggregate: Vec<AggregateRecord>,
    pub runs: Vec<RunRecord>,
}

impl From<&SweepResult> for SweepTables {
    fn from(res: &SweepResult) -> Self {
        let aggregate = res
            .rows
            .iter()
            .map(|r| AggregateRecord {
                case: r.scenario.case.clone(),
                den_gnb: r.scenario.den_gnb,
                ttt_tics: r.scenario.ttt_tics,
                velocity_kmh: r.scenario.velocity_kmh,
                replicates: r.replicates,
                mean_ho_rate: r.mean_ho_rate,
                ho_avg_sinr_db: r.ho_avg_sinr_db,
                failure_flag: r.failure_flag,
            })
            .collect();
        let runs = res
            .runs
            .iter()
            .map(|r| RunRecord {
                case: r.scenario.case.clone(),
                den_gnb: r.scenario.den_gnb,
                ttt_tics: r.scenario.ttt_tics,
                velocity_kmh: r.scenario.velocity_kmh,
                replicate: r.replicate,
                seed: r.seed,
                ho_times: r.ho_times,
                ho_avg_sinr_db: r.ho_avg_sinr_db(),
                outage_tics: r.outage_tics,
                mean_serving_sinr_db: r.mean_serving_sinr_db,
            })
            .collect();
        SweepTables { aggregate, runs }
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> SimError + '_ {
    move |source| SimError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_table<const N: usize>(
    path: &Path,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    let mut inner = w.into_inner().map_err(|e| SimError::Io {
        path: path.to_path_buf(),
        source: e.into_error(),
    })?;
    inner.flush().map_err(io_err(path))
}

impl SweepTables {
    /// Writes `aggregate.csv` and `runs.csv` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let agg = dir.join(AGGREGATE_FILE);
        let runs = dir.join(RUNS_FILE);
        write_table(&agg, AGGREGATE_HEADER, self.aggregate.iter().map(AggregateRecord::cells))?;
        write_table(&runs, RUNS_HEADER, self.runs.iter().map(RunRecord::cells))?;
        Ok((agg, runs))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        Ok(SweepTables {
            aggregate: read_aggregate(&dir.join(AGGREGATE_FILE))?,
            runs: read_runs(&dir.join(RUNS_FILE))?,
        })
    }
}

/// Writes both result files for a sweep into `dir`.
pub fn write_csv(result: &SweepResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    SweepTables::from(result).write(dir)
}

pub fn read_csv(dir: &Path) -> Result<SweepTables> {
    SweepTables::read(dir)
}

struct Cells<'a> {
    path: &'a Path,
    line: u64,
    record: csv::StringRecord,
}

impl Cells<'_> {
    fn get<T: std::str::FromStr>(&self, idx: usize, name: &str) -> Result<T> {
        self.record
            .get(idx)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.bad(name))
    }

    fn float(&self, idx: usize, name: &str) -> Result<f64> {
        self.record
            .get(idx)
            .and_then(parse_float)
            .ok_or_else(|| self.bad(name))
    }

    fn bad(&self, name: &str) -> SimError {
        SimError::Parse {
            path: self.path.to_path_buf(),
            reason: format!("line {}: bad value in column {name}", self.line),
        }
    }
}

fn read_table<const N: usize, T>(
    path: &Path,
    header: [&str; N],
    parse: impl Fn(&Cells<'_>) -> Result<T>,
) -> Result<Vec<T>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut r = csv::Reader::from_reader(file);
    let found = r.headers().map_err(csv_err(path))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(SimError::Parse {
            path: path.to_path_buf(),
            reason: format!("unexpected header {:?}", found.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let record = rec.map_err(csv_err(path))?;
        out.push(parse(&Cells {
            path,
            line: i as u64 + 2,
            record,
        })?);
    }
    Ok(out)
}

pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRecord>> {
    read_table(path, AGGREGATE_HEADER, |c| {
        Ok(AggregateRecord {
            case: c.get(0, "case")?,
            den_gnb: c.get(1, "den_gnb")?,
            ttt_tics: c.get(2, "ttt_tics")?,
            velocity_kmh: c.float(3, "velocity_kmh")?,
            replicates: c.get(4, "replicates")?,
            mean_ho_rate: c.float(5, "mean_ho_rate")?,
            ho_avg_sinr_db: c.float(6, "ho_avg_sinr_db")?,
            failure_flag: c.get(7, "failure_flag")?,
        })
    })
}

pub fn read_runs(path: &Path) -> Result<Vec<RunRecord>> {
    read_table(path, RUNS_HEADER, |c| {
        Ok(RunRecord {
            case: c.get(0, "case")?,
            den_gnb: c.get(1, "den_gnb")?,
            ttt_tics: c.get(2, "ttt_tics")?,
            velocity_kmh: c.float(3, "velocity_kmh")?,
            replicate: c.get(4, "replicate")?,
            seed: c.get(5, "seed")?,
            ho_times: c.get(6, "ho_times")?,
            ho_avg_sinr_db: c.float(7, "ho_avg_sinr_db")?,
            outage_tics: c.get(8, "outage_tics")?,
            mean_serving_sinr_db: c.float(9, "mean_serving_sinr_db")?,
        })
    })
}
