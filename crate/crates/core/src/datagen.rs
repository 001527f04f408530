//! Dataset profiles, trace generation, splitting, standardization and the
//! trace CSV format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh_sim::{self, as_count, BackendConfig, LoadAction, TrafficRules};

pub const NUM_INPUTS: usize = 9;
pub const NUM_OUTPUTS: usize = 2;

/// Canonical slot of the thread count in the 9-vector.
pub const THREADS_SLOT: usize = 7;
/// Canonical slot of the call count in the 9-vector.
pub const CALLS_SLOT: usize = 8;

/// The two loading settings an agent can decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoadKind {
    Threads,
    Calls,
}

impl LoadKind {
    pub fn slot(self) -> usize {
        match self {
            LoadKind::Threads => THREADS_SLOT,
            LoadKind::Calls => CALLS_SLOT,
        }
    }

    pub fn other(self) -> LoadKind {
        match self {
            LoadKind::Threads => LoadKind::Calls,
            LoadKind::Calls => LoadKind::Threads,
        }
    }

    pub fn value_of(self, load: &LoadAction) -> u32 {
        match self {
            LoadKind::Threads => load.threads,
            LoadKind::Calls => load.calls,
        }
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "max_pending",
    "max_connections",
    "max_req_per_conn",
    "ejection_time_s",
    "max_ejection_pct",
    "interval_s",
    "consecutive_errors",
    "threads",
    "calls",
    "qps",
    "p503",
];

/// Closed integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: u32,
    pub hi: u32,
}

impl IntRange {
    pub const fn new(lo: u32, hi: u32) -> Self {
        IntRange { lo, hi }
    }

    pub const fn point(v: u32) -> Self {
        IntRange { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo as f64 && v <= self.hi as f64
    }

    fn sample(&self, rng: &mut impl Rng) -> u32 {
        rng.random_range(self.lo..=self.hi)
    }
}

/// Sampling ranges for one family of load tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub name: String,
    pub max_pending_requests: IntRange,
    pub max_connections: IntRange,
    pub max_requests_per_connection: IntRange,
    pub max_ejection_pct: IntRange,
    pub consecutive_errors: IntRange,
    pub threads: IntRange,
    pub calls: IntRange,
    pub ejection_time_s: f64,
    pub interval_s: f64,
    /// Dataset size used for the original traces.
    pub reference_size: usize,
}

const EJECTION_TIME_S: f64 = 180.0;
const INTERVAL_S: f64 = 1.0;

impl Profile {
    pub fn s1() -> Self {
        Profile {
            name: "S1".into(),
            max_pending_requests: IntRange::new(1, 7),
            max_connections: IntRange::new(1, 7),
            max_requests_per_connection: IntRange::new(1, 7),
            max_ejection_pct: IntRange::point(100),
            consecutive_errors: IntRange::point(1),
            threads: IntRange::new(1, 5),
            calls: IntRange::new(400, 450),
            ejection_time_s: EJECTION_TIME_S,
            interval_s: INTERVAL_S,
            reference_size: 9302,
        }
    }

    pub fn s2() -> Self {
        Profile {
            name: "S2".into(),
            max_pending_requests: IntRange::new(3, 7),
            max_connections: IntRange::new(3, 7),
            max_requests_per_connection: IntRange::new(3, 7),
            max_ejection_pct: IntRange::point(100),
            consecutive_errors: IntRange::point(1),
            threads: IntRange::new(3, 7),
            calls: IntRange::new(100, 700),
            ejection_time_s: EJECTION_TIME_S,
            interval_s: INTERVAL_S,
            reference_size: 12005,
        }
    }

    pub fn s3() -> Self {
        Profile {
            name: "S3".into(),
            max_pending_requests: IntRange::new(12, 18),
            max_connections: IntRange::new(1, 5),
            max_requests_per_connection: IntRange::new(10, 16),
            max_ejection_pct: IntRange::new(4, 8),
            consecutive_errors: IntRange::new(4, 8),
            threads: IntRange::new(10, 16),
            calls: IntRange::new(50, 500),
            ejection_time_s: EJECTION_TIME_S,
            interval_s: INTERVAL_S,
            reference_size: 20592,
        }
    }

    pub fn s4() -> Self {
        Profile {
            name: "S4".into(),
            max_pending_requests: IntRange::new(12, 18),
            max_connections: IntRange::new(10, 20),
            max_requests_per_connection: IntRange::new(12, 18),
            max_ejection_pct: IntRange::new(12, 18),
            consecutive_errors: IntRange::new(12, 18),
            threads: IntRange::new(12, 18),
            calls: IntRange::new(250, 600),
            ejection_time_s: EJECTION_TIME_S,
            interval_s: INTERVAL_S,
            reference_size: 12310,
        }
    }

    pub fn s5() -> Self {
        Profile {
            name: "S5".into(),
            max_pending_requests: IntRange::new(15, 30),
            max_connections: IntRange::new(5, 15),
            max_requests_per_connection: IntRange::new(15, 30),
            max_ejection_pct: IntRange::new(22, 30),
            consecutive_errors: IntRange::new(22, 30),
            threads: IntRange::new(16, 20),
            calls: IntRange::new(1000, 2000),
            ejection_time_s: EJECTION_TIME_S,
            interval_s: INTERVAL_S,
            reference_size: 6970,
        }
    }

    pub fn all() -> [Profile; 5] {
        [Self::s1(), Self::s2(), Self::s3(), Self::s4(), Self::s5()]
    }

    /// Looks a preset up by name, case-insensitively (`s1`..`s5`).
    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "s1" => Ok(Self::s1()),
            "s2" => Ok(Self::s2()),
            "s3" => Ok(Self::s3()),
            "s4" => Ok(Self::s4()),
            "s5" => Ok(Self::s5()),
            other => Err(Error::validation(
                "profile",
                format!("unknown profile {other:?}, expected one of s1..s5"),
            )),
        }
    }

    /// A profile whose every range is the single given point.
    pub fn point(name: &str, rules: &TrafficRules, load: &LoadAction) -> Result<Self> {
        let pct = as_count("max_ejection_pct", rules.max_ejection_pct)?;
        Ok(Profile {
            name: name.into(),
            max_pending_requests: IntRange::point(rules.max_pending_requests),
            max_connections: IntRange::point(rules.max_connections),
            max_requests_per_connection: IntRange::point(rules.max_requests_per_connection),
            max_ejection_pct: IntRange::point(pct),
            consecutive_errors: IntRange::point(rules.consecutive_errors),
            threads: IntRange::point(load.threads),
            calls: IntRange::point(load.calls),
            ejection_time_s: rules.ejection_time_s,
            interval_s: rules.interval_s,
            reference_size: 1,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("max_pending_requests", self.max_pending_requests),
            ("max_connections", self.max_connections),
            ("max_requests_per_connection", self.max_requests_per_connection),
            ("max_ejection_pct", self.max_ejection_pct),
            ("consecutive_errors", self.consecutive_errors),
            ("threads", self.threads),
            ("calls", self.calls),
        ];
        for (field, r) in ranges {
            if r.lo > r.hi {
                return Err(Error::validation(field, format!("empty range {}..={}", r.lo, r.hi)));
            }
        }
        if self.max_ejection_pct.hi > 100 {
            return Err(Error::validation("max_ejection_pct", "range exceeds 100"));
        }
        if self.calls.lo < self.threads.hi {
            return Err(Error::validation(
                "calls",
                "lower bound must be >= the largest thread count",
            ));
        }
        Ok(())
    }

    /// Range of a canonical slot, with fixed fields as point ranges.
    pub fn slot_bounds(&self, slot: usize) -> (f64, f64) {
        let r = |r: IntRange| (r.lo as f64, r.hi as f64);
        match slot {
            0 => r(self.max_pending_requests),
            1 => r(self.max_connections),
            2 => r(self.max_requests_per_connection),
            3 => (self.ejection_time_s, self.ejection_time_s),
            4 => r(self.max_ejection_pct),
            5 => (self.interval_s, self.interval_s),
            6 => r(self.consecutive_errors),
            THREADS_SLOT => r(self.threads),
            CALLS_SLOT => r(self.calls),
            _ => panic!("slot {slot} out of range"),
        }
    }

    pub fn contains(&self, inputs: &[f64; NUM_INPUTS]) -> bool {
        inputs.iter().enumerate().all(|(slot, &v)| {
            let (lo, hi) = self.slot_bounds(slot);
            v >= lo && v <= hi
        })
    }
}

/// Draws one configuration uniformly from the profile, field by field in
/// canonical order.
pub fn sample_config(profile: &Profile, rng: &mut impl Rng) -> (TrafficRules, LoadAction) {
    let max_pending_requests = profile.max_pending_requests.sample(rng);
    let max_connections = profile.max_connections.sample(rng);
    let max_requests_per_connection = profile.max_requests_per_connection.sample(rng);
    let max_ejection_pct = profile.max_ejection_pct.sample(rng) as f64;
    let consecutive_errors = profile.consecutive_errors.sample(rng);
    let threads = profile.threads.sample(rng);
    let calls = profile.calls.sample(rng);
    (
        TrafficRules {
            max_pending_requests,
            max_connections,
            max_requests_per_connection,
            ejection_time_s: profile.ejection_time_s,
            max_ejection_pct,
            interval_s: profile.interval_s,
            consecutive_errors,
        },
        LoadAction { threads, calls },
    )
}

/// One labelled load test: 9 inputs and 2 outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub rules: TrafficRules,
    pub load: LoadAction,
    pub qps: f64,
    pub p503: f64,
}

impl TraceRecord {
    pub fn inputs(&self) -> [f64; NUM_INPUTS] {
        compose_inputs(&self.rules, &self.load)
    }

    pub fn outputs(&self) -> [f64; NUM_OUTPUTS] {
        [self.qps, self.p503]
    }
}

pub fn compose_inputs(rules: &TrafficRules, load: &LoadAction) -> [f64; NUM_INPUTS] {
    let r = rules.to_array();
    [
        r[0],
        r[1],
        r[2],
        r[3],
        r[4],
        r[5],
        r[6],
        load.threads as f64,
        load.calls as f64,
    ]
}

/// Splits a canonical 9-vector back into rules and loading settings.
pub fn decompose_inputs(inputs: &[f64; NUM_INPUTS]) -> Result<(TrafficRules, LoadAction)> {
    let mut rules = [0.0; 7];
    rules.copy_from_slice(&inputs[..7]);
    let rules = TrafficRules::from_array(&rules)?;
    let load = LoadAction {
        threads: as_count("threads", inputs[THREADS_SLOT])?,
        calls: as_count("calls", inputs[CALLS_SLOT])?,
    };
    load.validate()?;
    Ok((rules, load))
}

/// Samples `size` configurations and labels each with the simulator. Record
/// `i` is simulated with seed `seed ^ i`.
pub fn generate_dataset(
    profile: &Profile,
    size: usize,
    seed: u64,
    cfg: &BackendConfig,
) -> Result<Vec<TraceRecord>> {
    if size == 0 {
        return Err(Error::validation("size", "must be >= 1"));
    }
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|i| {
            let (rules, load) = sample_config(profile, &mut rng);
            let resp = mesh_sim::simulate(&rules, &load, cfg, seed ^ i as u64)?;
            Ok(TraceRecord {
                rules,
                load,
                qps: resp.qps,
                p503: resp.p503,
            })
        })
        .collect()
}

/// Seeded shuffle followed by a prefix split; the train part holds
/// `round(ratio * N)` records.
pub fn split_dataset(
    records: &[TraceRecord],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<TraceRecord>, Vec<TraceRecord>)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::validation("ratio", format!("must lie in (0, 1), got {ratio}")));
    }
    let n = records.len();
    let n_train = (ratio * n as f64).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::validation(
            "ratio",
            format!("split of {n} records at {ratio} leaves an empty side"),
        ));
    }
    let mut shuffled = records.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = shuffled.split_off(n_train);
    Ok((shuffled, test))
}

/// Per-feature z-score statistics fitted on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub output_mean: Vec<f64>,
    pub output_std: Vec<f64>,
}

fn column_stats(rows: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = rows.clone().sum::<f64>() / n as f64;
    let var = rows.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    // constant columns scale to zero rather than dividing by zero
    (mean, if std > 0.0 { std } else { 1.0 })
}

pub fn fit_scaler(train: &[TraceRecord]) -> Result<ScalerParams> {
    if train.is_empty() {
        return Err(Error::validation("train", "cannot fit a scaler on an empty set"));
    }
    let n = train.len();
    let inputs: Vec<_> = train.iter().map(TraceRecord::inputs).collect();
    let outputs: Vec<_> = train.iter().map(TraceRecord::outputs).collect();
    let (input_mean, input_std) = (0..NUM_INPUTS)
        .map(|j| column_stats(inputs.iter().map(move |x| x[j]), n))
        .unzip();
    let (output_mean, output_std) = (0..NUM_OUTPUTS)
        .map(|j| column_stats(outputs.iter().map(move |y| y[j]), n))
        .unzip();
    Ok(ScalerParams {
        input_mean,
        input_std,
        output_mean,
        output_std,
    })
}

impl ScalerParams {
    pub fn validate(&self) -> Result<()> {
        let lens = [
            ("input_mean", self.input_mean.len(), NUM_INPUTS),
            ("input_std", self.input_std.len(), NUM_INPUTS),
            ("output_mean", self.output_mean.len(), NUM_OUTPUTS),
            ("output_std", self.output_std.len(), NUM_OUTPUTS),
        ];
        for (field, got, want) in lens {
            if got != want {
                return Err(Error::Format(format!("scaler.{field}: expected {want} values, got {got}")));
            }
        }
        if self
            .input_std
            .iter()
            .chain(&self.output_std)
            .any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(Error::Format("scaler: standard deviations must be positive".into()));
        }
        Ok(())
    }

    pub fn scale_input(&self, x: &[f64; NUM_INPUTS]) -> [f64; NUM_INPUTS] {
        std::array::from_fn(|j| (x[j] - self.input_mean[j]) / self.input_std[j])
    }

    pub fn unscale_input(&self, z: &[f64; NUM_INPUTS]) -> [f64; NUM_INPUTS] {
        std::array::from_fn(|j| z[j] * self.input_std[j] + self.input_mean[j])
    }

    pub fn scale_output(&self, y: &[f64; NUM_OUTPUTS]) -> [f64; NUM_OUTPUTS] {
        std::array::from_fn(|j| (y[j] - self.output_mean[j]) / self.output_std[j])
    }

    pub fn unscale_output(&self, z: &[f64; NUM_OUTPUTS]) -> [f64; NUM_OUTPUTS] {
        std::array::from_fn(|j| z[j] * self.output_std[j] + self.output_mean[j])
    }
}

/// Standardized design matrices for a record set.
#[derive(Debug, Clone)]
pub struct ScaledSet {
    pub inputs: Array2<f64>,
    pub targets: Array2<f64>,
}

pub fn apply_scaler(params: &ScalerParams, records: &[TraceRecord]) -> ScaledSet {
    let n = records.len();
    let mut inputs = Array2::zeros((n, NUM_INPUTS));
    let mut targets = Array2::zeros((n, NUM_OUTPUTS));
    for (i, rec) in records.iter().enumerate() {
        for (j, v) in params.scale_input(&rec.inputs()).into_iter().enumerate() {
            inputs[[i, j]] = v;
        }
        for (j, v) in params.scale_output(&rec.outputs()).into_iter().enumerate() {
            targets[[i, j]] = v;
        }
    }
    ScaledSet { inputs, targets }
}

fn format_record(rec: &TraceRecord) -> [String; 11] {
    let r = &rec.rules;
    [
        r.max_pending_requests.to_string(),
        r.max_connections.to_string(),
        r.max_requests_per_connection.to_string(),
        r.ejection_time_s.to_string(),
        r.max_ejection_pct.to_string(),
        r.interval_s.to_string(),
        r.consecutive_errors.to_string(),
        rec.load.threads.to_string(),
        rec.load.calls.to_string(),
        rec.qps.to_string(),
        rec.p503.to_string(),
    ]
}

/// Writes records as CSV: fixed header, integers unquoted, reals in
/// shortest round-trip form, `\n` line endings.
pub fn write_csv(records: &[TraceRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = |line: String| out.write_all(line.as_bytes()).map_err(|e| Error::io(path, e));
    write(format!("{}\n", CSV_HEADER.join(",")))?;
    for rec in records {
        write(format!("{}\n", format_record(rec).join(",")))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<TraceRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(file);

    let mut rows = reader.records();
    let header = match rows.next() {
        None => return Err(Error::Format(format!("{}: missing header", path.display()))),
        Some(row) => row.map_err(|e| csv_error(e, 1))?,
    };
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Format(format!(
            "{}: header must be `{}`",
            path.display(),
            CSV_HEADER.join(",")
        )));
    }

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != CSV_HEADER.len() {
            return Err(Error::Parse {
                line,
                reason: format!("expected {} fields, found {}", CSV_HEADER.len(), row.len()),
            });
        }
        let mut values = [0.0; 11];
        for (j, field) in row.iter().enumerate() {
            values[j] = field.parse::<f64>().map_err(|_| Error::Parse {
                line,
                reason: format!("column {}: cannot parse {field:?}", CSV_HEADER[j]),
            })?;
        }
        let mut inputs = [0.0; NUM_INPUTS];
        inputs.copy_from_slice(&values[..NUM_INPUTS]);
        let (rules, load) = decompose_inputs(&inputs).map_err(|e| Error::Parse {
            line,
            reason: e.to_string(),
        })?;
        records.push(TraceRecord {
            rules,
            load,
            qps: values[9],
            p503: values[10],
        });
    }
    Ok(records)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> Error {
    let line = err.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        reason: err.to_string(),
    }
}
