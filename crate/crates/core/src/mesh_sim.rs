//! Ground-truth environment: a seeded discrete-event model of one service
//! behind a circuit-breaking sidecar, driven by a closed-loop load generator.
//!
//! The load generator runs `threads` workers that split `calls` requests
//! between them (remainder to the lowest worker indices). A worker issues its
//! next request only once the previous one resolved. The sidecar admits a
//! request onto a pooled connection, parks it in the pending queue, or fails
//! it with an immediate 503. Admitted requests go to the least-loaded
//! non-ejected replica. Every `interval_s` a sweep ejects each replica whose
//! run of consecutive 503s reached `consecutive_errors` at some point since
//! the previous sweep, subject to the `max_ejection_pct` cap.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The seven circuit-breaker and outlier-detection attributes of a
/// destination rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficRules {
    pub max_pending_requests: u32,
    pub max_connections: u32,
    pub max_requests_per_connection: u32,
    pub ejection_time_s: f64,
    pub max_ejection_pct: f64,
    pub interval_s: f64,
    pub consecutive_errors: u32,
}

impl TrafficRules {
    pub fn validate(&self) -> Result<()> {
        if self.max_connections < 1 {
            return Err(Error::validation("max_connections", "must be >= 1"));
        }
        if self.max_requests_per_connection < 1 {
            return Err(Error::validation(
                "max_requests_per_connection",
                "must be >= 1",
            ));
        }
        if self.consecutive_errors < 1 {
            return Err(Error::validation("consecutive_errors", "must be >= 1"));
        }
        if !(self.ejection_time_s.is_finite() && self.ejection_time_s > 0.0) {
            return Err(Error::validation(
                "ejection_time_s",
                format!("must be finite and > 0, got {}", self.ejection_time_s),
            ));
        }
        if !(self.interval_s.is_finite() && self.interval_s > 0.0) {
            return Err(Error::validation(
                "interval_s",
                format!("must be finite and > 0, got {}", self.interval_s),
            ));
        }
        if !(0.0..=100.0).contains(&self.max_ejection_pct) {
            return Err(Error::validation(
                "max_ejection_pct",
                format!("must lie in [0, 100], got {}", self.max_ejection_pct),
            ));
        }
        Ok(())
    }

    /// Values in canonical column order.
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.max_pending_requests as f64,
            self.max_connections as f64,
            self.max_requests_per_connection as f64,
            self.ejection_time_s,
            self.max_ejection_pct,
            self.interval_s,
            self.consecutive_errors as f64,
        ]
    }

    /// Inverse of [`TrafficRules::to_array`]. Count fields must be
    /// non-negative integers.
    pub fn from_array(values: &[f64; 7]) -> Result<Self> {
        let rules = TrafficRules {
            max_pending_requests: as_count("max_pending_requests", values[0])?,
            max_connections: as_count("max_connections", values[1])?,
            max_requests_per_connection: as_count("max_requests_per_connection", values[2])?,
            ejection_time_s: values[3],
            max_ejection_pct: values[4],
            interval_s: values[5],
            consecutive_errors: as_count("consecutive_errors", values[6])?,
        };
        rules.validate()?;
        Ok(rules)
    }
}

pub(crate) fn as_count(field: &str, value: f64) -> Result<u32> {
    if value.is_finite() && value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as u32)
    } else {
        Err(Error::validation(
            field,
            format!("expected a non-negative integer, got {value}"),
        ))
    }
}

/// Load-test settings chosen by the agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadAction {
    pub threads: u32,
    pub calls: u32,
}

impl LoadAction {
    pub fn validate(&self) -> Result<()> {
        if self.threads < 1 {
            return Err(Error::validation("threads", "must be >= 1"));
        }
        if self.calls < self.threads {
            return Err(Error::validation(
                "calls",
                format!(
                    "must be >= threads ({}), got {}",
                    self.threads, self.calls
                ),
            ));
        }
        Ok(())
    }
}

/// Outcome of one load test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceResponse {
    pub qps: f64,
    pub p200: f64,
    pub p503: f64,
}

/// Synthetic backend behind the sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub replicas: u32,
    /// Mean of the log-normal service latency, in milliseconds.
    pub base_latency_ms: f64,
    pub latency_sigma: f64,
    pub base_fault_prob: f64,
    /// Slope of the fault probability above per-replica capacity.
    pub overload_slope: f64,
    pub per_replica_capacity: u32,
    /// Latency multiplier per in-flight request on the chosen replica.
    pub latency_congestion_coeff: f64,
    /// Extra latency paid by the first request on a fresh connection.
    pub connect_latency_ms: f64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            replicas: 3,
            base_latency_ms: 20.0,
            latency_sigma: 0.5,
            base_fault_prob: 0.05,
            overload_slope: 0.8,
            per_replica_capacity: 8,
            latency_congestion_coeff: 0.1,
            connect_latency_ms: 2.0,
        }
    }
}

impl BackendConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::validation("replicas", "must be >= 1"));
        }
        if self.per_replica_capacity < 1 {
            return Err(Error::validation("per_replica_capacity", "must be >= 1"));
        }
        let positive = [("base_latency_ms", self.base_latency_ms)];
        for (field, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(field, format!("must be finite and > 0, got {v}")));
            }
        }
        let non_negative = [
            ("latency_sigma", self.latency_sigma),
            ("overload_slope", self.overload_slope),
            ("latency_congestion_coeff", self.latency_congestion_coeff),
            ("connect_latency_ms", self.connect_latency_ms),
            ("base_fault_prob", self.base_fault_prob),
        ];
        for (field, v) in non_negative {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Failure probability of a request landing on a replica that now holds
/// `inflight` requests (including this one).
pub fn error_probability(inflight: u32, cfg: &BackendConfig) -> f64 {
    let cap = cfg.per_replica_capacity.max(1) as f64;
    let excess = (inflight as f64 - cap).max(0.0);
    (cfg.base_fault_prob + cfg.overload_slope * excess / cap).clamp(0.0, 1.0)
}

/// Counters collected alongside the response.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimStats {
    pub ok: u32,
    /// 503s returned by a replica.
    pub backend_503: u32,
    /// 503s from a full connection pool and pending queue.
    pub overflow_503: u32,
    /// 503s because every replica was ejected.
    pub no_host_503: u32,
    pub ejections: u32,
    pub makespan_s: f64,
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    Issue,
    Complete { replica: usize, slot: usize, ok: bool },
    Sweep,
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    /// Worker index; sweeps sort after every worker at equal time.
    rank: u32,
    seq: u64,
    kind: EventKind,
}

impl Event {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.rank.cmp(&other.rank))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    // min-heap on (time, rank, seq)
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

const SWEEP_RANK: u32 = u32::MAX;

struct Sim<'a> {
    rules: &'a TrafficRules,
    cfg: &'a BackendConfig,
    rng: ChaCha8Rng,
    latency: LogNormal<f64>,
    heap: BinaryHeap<Event>,
    seq: u64,
    quota: Vec<u32>,
    slot_busy: Vec<bool>,
    slot_uses: Vec<u32>,
    busy_slots: u32,
    pending: VecDeque<u32>,
    inflight: Vec<u32>,
    consecutive: Vec<u32>,
    /// Longest run of consecutive 503s since the previous sweep.
    peak_consecutive: Vec<u32>,
    ejected_until: Vec<f64>,
    unresolved: u32,
    stats: SimStats,
}

impl<'a> Sim<'a> {
    fn push(&mut self, time: f64, rank: u32, kind: EventKind) {
        self.seq += 1;
        self.heap.push(Event {
            time,
            rank,
            seq: self.seq,
            kind,
        });
    }

    fn resolve(&mut self, now: f64) {
        self.unresolved -= 1;
        if now > self.stats.makespan_s {
            self.stats.makespan_s = now;
        }
    }

    fn is_ejected(&self, replica: usize, now: f64) -> bool {
        self.ejected_until[replica] > now
    }

    fn pick_replica(&self, now: f64) -> Option<usize> {
        (0..self.inflight.len())
            .filter(|&r| !self.is_ejected(r, now))
            .min_by_key(|&r| (self.inflight[r], r))
    }

    fn issue(&mut self, worker: u32, now: f64) {
        let w = worker as usize;
        if self.quota[w] == 0 {
            return;
        }
        self.quota[w] -= 1;
        if self.busy_slots < self.rules.max_connections {
            self.dispatch(worker, now);
        } else if (self.pending.len() as u64) < self.rules.max_pending_requests as u64 {
            self.pending.push_back(worker);
        } else {
            self.stats.overflow_503 += 1;
            self.resolve(now);
            self.push(now, worker, EventKind::Issue);
        }
    }

    fn dispatch(&mut self, worker: u32, now: f64) {
        let Some(replica) = self.pick_replica(now) else {
            self.stats.no_host_503 += 1;
            self.resolve(now);
            self.push(now, worker, EventKind::Issue);
            return;
        };
        let slot = self
            .slot_busy
            .iter()
            .position(|busy| !busy)
            .expect("a free slot exists whenever busy_slots < max_connections");
        self.slot_busy[slot] = true;
        self.busy_slots += 1;
        self.inflight[replica] += 1;
        let load = self.inflight[replica];

        let mut latency_ms =
            self.latency.sample(&mut self.rng) * (1.0 + self.cfg.latency_congestion_coeff * load as f64);
        if self.slot_uses[slot] == 0 {
            latency_ms += self.cfg.connect_latency_ms;
        }
        let ok = self.rng.random::<f64>() >= error_probability(load, self.cfg);
        self.push(
            now + latency_ms / 1000.0,
            worker,
            EventKind::Complete { replica, slot, ok },
        );
    }

    fn complete(&mut self, worker: u32, replica: usize, slot: usize, ok: bool, now: f64) {
        self.inflight[replica] -= 1;
        if ok {
            self.consecutive[replica] = 0;
            self.stats.ok += 1;
        } else {
            self.consecutive[replica] += 1;
            self.peak_consecutive[replica] =
                self.peak_consecutive[replica].max(self.consecutive[replica]);
            self.stats.backend_503 += 1;
        }
        self.resolve(now);

        self.slot_busy[slot] = false;
        self.busy_slots -= 1;
        self.slot_uses[slot] += 1;
        if self.slot_uses[slot] >= self.rules.max_requests_per_connection {
            self.slot_uses[slot] = 0;
        }

        while self.busy_slots < self.rules.max_connections {
            let Some(next) = self.pending.pop_front() else {
                break;
            };
            self.dispatch(next, now);
        }
        self.push(now, worker, EventKind::Issue);
    }

    fn sweep(&mut self, now: f64) {
        let replicas = self.inflight.len();
        let max_ejected =
            (replicas as f64 * self.rules.max_ejection_pct / 100.0).floor() as usize;
        let mut ejected = (0..replicas).filter(|&r| self.is_ejected(r, now)).count();
        for r in 0..replicas {
            let tripped = self.peak_consecutive[r] >= self.rules.consecutive_errors;
            self.peak_consecutive[r] = self.consecutive[r];
            if !tripped || self.is_ejected(r, now) || ejected + 1 > max_ejected {
                continue;
            }
            self.ejected_until[r] = now + self.rules.ejection_time_s;
            self.consecutive[r] = 0;
            self.peak_consecutive[r] = 0;
            ejected += 1;
            self.stats.ejections += 1;
        }
        if self.unresolved > 0 {
            self.push(now + self.rules.interval_s, SWEEP_RANK, EventKind::Sweep);
        }
    }
}

/// Runs one load test and returns the response together with counters.
pub fn simulate_with_stats(
    rules: &TrafficRules,
    load: &LoadAction,
    cfg: &BackendConfig,
    seed: u64,
) -> Result<(ServiceResponse, SimStats)> {
    rules.validate()?;
    load.validate()?;
    cfg.validate()?;

    let sigma = cfg.latency_sigma;
    // mean of the log-normal equals base_latency_ms
    let mu = cfg.base_latency_ms.ln() - 0.5 * sigma * sigma;
    let latency = LogNormal::new(mu, sigma)
        .map_err(|e| Error::validation("latency_sigma", e.to_string()))?;

    let threads = load.threads as usize;
    let share = load.calls / load.threads;
    let extra = (load.calls % load.threads) as usize;
    let quota = (0..threads)
        .map(|w| share + u32::from(w < extra))
        .collect();
    let replicas = cfg.replicas as usize;
    let slots = rules.max_connections as usize;

    let mut sim = Sim {
        rules,
        cfg,
        rng: ChaCha8Rng::seed_from_u64(seed),
        latency,
        heap: BinaryHeap::new(),
        seq: 0,
        quota,
        slot_busy: vec![false; slots],
        slot_uses: vec![0; slots],
        busy_slots: 0,
        pending: VecDeque::new(),
        inflight: vec![0; replicas],
        consecutive: vec![0; replicas],
        peak_consecutive: vec![0; replicas],
        ejected_until: vec![f64::NEG_INFINITY; replicas],
        unresolved: load.calls,
        stats: SimStats::default(),
    };

    for w in 0..load.threads {
        sim.push(0.0, w, EventKind::Issue);
    }
    sim.push(rules.interval_s, SWEEP_RANK, EventKind::Sweep);

    while let Some(ev) = sim.heap.pop() {
        match ev.kind {
            EventKind::Issue => sim.issue(ev.rank, ev.time),
            EventKind::Complete { replica, slot, ok } => {
                sim.complete(ev.rank, replica, slot, ok, ev.time)
            }
            EventKind::Sweep => sim.sweep(ev.time),
        }
        if sim.unresolved == 0 {
            break;
        }
    }
    debug_assert_eq!(sim.unresolved, 0);

    let stats = sim.stats;
    let failed = stats.backend_503 + stats.overflow_503 + stats.no_host_503;
    let p503 = failed as f64 / load.calls as f64;
    let p200 = 1.0 - p503;
    let qps = if stats.makespan_s > 0.0 {
        load.calls as f64 / stats.makespan_s
    } else {
        0.0
    };
    Ok((ServiceResponse { qps, p200, p503 }, stats))
}

/// Runs one load test. Identical arguments give a bit-identical response.
pub fn simulate(
    rules: &TrafficRules,
    load: &LoadAction,
    cfg: &BackendConfig,
    seed: u64,
) -> Result<ServiceResponse> {
    simulate_with_stats(rules, load, cfg, seed).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1_mid() -> TrafficRules {
        TrafficRules {
            max_pending_requests: 4,
            max_connections: 4,
            max_requests_per_connection: 4,
            ejection_time_s: 180.0,
            max_ejection_pct: 100.0,
            interval_s: 1.0,
            consecutive_errors: 1,
        }
    }

    #[test]
    fn error_probability_examples() {
        let mut cfg = BackendConfig {
            base_fault_prob: 0.0,
            ..Default::default()
        };
        assert_eq!(error_probability(0, &cfg), 0.0);
        cfg.base_fault_prob = 0.05;
        assert_eq!(error_probability(cfg.per_replica_capacity, &cfg), 0.05);
        cfg.per_replica_capacity = 8;
        cfg.overload_slope = 0.8;
        assert!((error_probability(16, &cfg) - 0.85).abs() < 1e-15);
        assert_eq!(error_probability(1000, &cfg), 1.0);
    }

    #[test]
    fn all_requests_fail_at_unit_fault_probability() {
        let cfg = BackendConfig {
            base_fault_prob: 1.0,
            ..Default::default()
        };
        let load = LoadAction { threads: 3, calls: 435 };
        let r = simulate(&s1_mid(), &load, &cfg, 1).unwrap();
        assert_eq!(r.p503, 1.0);
        assert_eq!(r.p200, 0.0);
        assert!(r.qps > 0.0);
    }

    #[test]
    fn fault_free_uncongested_has_no_failures() {
        let cfg = BackendConfig {
            base_fault_prob: 0.0,
            overload_slope: 0.0,
            ..Default::default()
        };
        let load = LoadAction { threads: 4, calls: 400 };
        let r = simulate(&s1_mid(), &load, &cfg, 9).unwrap();
        assert_eq!(r.p503, 0.0);
        assert_eq!(r.p200, 1.0);
    }

    #[test]
    fn overflow_fails_surplus_workers() {
        let cfg = BackendConfig {
            base_fault_prob: 0.0,
            overload_slope: 0.0,
            ..Default::default()
        };
        let rules = TrafficRules {
            max_pending_requests: 0,
            max_connections: 1,
            ..s1_mid()
        };
        let load = LoadAction { threads: 10, calls: 100 };
        let (r, stats) = simulate_with_stats(&rules, &load, &cfg, 3).unwrap();
        assert!(r.p503 > 0.0);
        assert_eq!(stats.overflow_503 + stats.ok, 100);
    }

    #[test]
    fn all_ejected_fails_remaining_calls() {
        let cfg = BackendConfig {
            base_fault_prob: 1.0,
            ..Default::default()
        };
        let (_, stats) =
            simulate_with_stats(&s1_mid(), &LoadAction { threads: 2, calls: 2000 }, &cfg, 5)
                .unwrap();
        assert_eq!(stats.ejections, 3);
        assert!(stats.no_host_503 > 0);
    }

    #[test]
    fn ejection_cap_is_floor_of_percentage() {
        let cfg = BackendConfig {
            base_fault_prob: 1.0,
            ..Default::default()
        };
        let rules = TrafficRules {
            max_ejection_pct: 50.0,
            ..s1_mid()
        };
        let (_, stats) =
            simulate_with_stats(&rules, &LoadAction { threads: 2, calls: 2000 }, &cfg, 5)
                .unwrap();
        // floor(3 * 0.5) = 1
        assert_eq!(stats.ejections, 1);
        assert_eq!(stats.no_host_503, 0);
    }

    #[test]
    fn rejects_invalid_fields() {
        let bad = TrafficRules {
            max_connections: 0,
            ..s1_mid()
        };
        let err = simulate(&bad, &LoadAction { threads: 1, calls: 1 }, &Default::default(), 0)
            .unwrap_err();
        assert!(err.to_string().contains("max_connections"));

        let err = simulate(&s1_mid(), &LoadAction { threads: 5, calls: 4 }, &Default::default(), 0)
            .unwrap_err();
        assert!(err.to_string().contains("calls"));

        let bad = TrafficRules {
            max_ejection_pct: 120.0,
            ..s1_mid()
        };
        let err = simulate(&bad, &LoadAction { threads: 1, calls: 1 }, &Default::default(), 0)
            .unwrap_err();
        assert!(err.to_string().contains("max_ejection_pct"));
    }

    #[test]
    fn deterministic_per_seed() {
        let load = LoadAction { threads: 3, calls: 435 };
        let cfg = BackendConfig::default();
        let a = simulate(&s1_mid(), &load, &cfg, 42).unwrap();
        let b = simulate(&s1_mid(), &load, &cfg, 42).unwrap();
        assert_eq!(a.qps.to_bits(), b.qps.to_bits());
        assert_eq!(a.p503.to_bits(), b.p503.to_bits());
    }
}
