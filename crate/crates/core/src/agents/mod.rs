//! Rewards, action grids, Q-networks and the per-round learning loops for
//! single, paired and collaborative agents.

mod collab;
mod net;
mod rounds;

pub use collab::{AuxSample, CollabNets, COLLAB_LEARNING_RATE};
pub use net::{
    discounted_return, softmax, AgentNet, Trajectory, TrajectoryStep, UpdateRule,
    AGENT_LEARNING_RATE, HIDDEN_WIDTH,
};
pub use rounds::{
    round_reward, run_round_collab, run_round_multi, run_round_single, MultiMode, RoundContext,
    RoundOutcome, RoundRecord, Service, ServiceStep,
};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::{decompose_inputs, LoadKind, Profile, NUM_INPUTS};
use crate::error::{Error, Result};
use crate::mesh_sim::{simulate, BackendConfig};
use crate::surrogate::SurrogateModel;

/// `qps * p503`.
pub fn reward_503(qps: f64, p503: f64) -> f64 {
    qps * p503
}

/// Reward of service `n` (0-based) with a collaboration bonus of `beta`
/// times the mean reward over all services.
pub fn reward_multi(n: usize, qps: &[f64], p503: &[f64], beta: f64) -> Result<f64> {
    if qps.len() != p503.len() || qps.is_empty() {
        return Err(Error::validation(
            "p503",
            format!("{} throughputs but {} failure rates", qps.len(), p503.len()),
        ));
    }
    if n >= qps.len() {
        return Err(Error::validation(
            "service",
            format!("index {n} out of range for {} services", qps.len()),
        ));
    }
    let total: f64 = qps.iter().zip(p503).map(|(&q, &p)| reward_503(q, p)).sum();
    Ok(reward_503(qps[n], p503[n]) + beta * total / qps.len() as f64)
}

/// Admissible values of one loading setting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpace {
    pub kind: LoadKind,
    pub values: Vec<u32>,
}

impl ActionSpace {
    pub fn new(kind: LoadKind, values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::validation("values", "action grid is empty"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::validation("values", "action grid must be strictly increasing"));
        }
        Ok(ActionSpace { kind, values })
    }

    /// Grid used for a profile. The five presets have fixed grids; any
    /// other profile gets every integer of its range, or 11 evenly spaced
    /// points when the range is wider than 32.
    pub fn for_profile(profile: &Profile, kind: LoadKind) -> Result<Self> {
        let preset = match (profile.name.to_ascii_uppercase().as_str(), kind) {
            ("S1", LoadKind::Threads) => Some((1..=5).collect()),
            ("S1", LoadKind::Calls) => Some((435..=450).collect()),
            ("S2", LoadKind::Threads) => Some((3..=7).collect()),
            ("S2", LoadKind::Calls) => Some((100..=400).step_by(100).collect()),
            ("S3", LoadKind::Threads) => Some((10..=16).collect()),
            ("S3", LoadKind::Calls) => Some((50..=500).step_by(50).collect()),
            ("S4", LoadKind::Threads) => Some((12..=18).collect()),
            ("S4", LoadKind::Calls) => Some((250..=600).step_by(50).collect()),
            ("S5", LoadKind::Threads) => Some((16..=20).collect()),
            ("S5", LoadKind::Calls) => Some((1000..=2000).step_by(100).collect()),
            _ => None,
        };
        let (lo, hi) = profile.slot_bounds(kind.slot());
        let space = match preset {
            Some(values) => ActionSpace::new(kind, values)?,
            None => {
                let (lo, hi) = (lo as u32, hi as u32);
                let values = if hi - lo <= 32 {
                    (lo..=hi).collect()
                } else {
                    let mut v: Vec<u32> = (0..=10)
                        .map(|i| lo + ((hi - lo) as f64 * i as f64 / 10.0).round() as u32)
                        .collect();
                    v.dedup();
                    v
                };
                ActionSpace::new(kind, values)?
            }
        };
        if space.values.iter().any(|&v| (v as f64) < lo || (v as f64) > hi) {
            return Err(Error::validation(
                "values",
                format!("{kind:?} grid leaves the {} range {lo}..={hi}", profile.name),
            ));
        }
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index] as f64
    }
}

/// Maps raw state values onto roughly `[-1, 1]` using the profile range of
/// each slot; slots with a fixed value encode as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEncoder {
    slots: Vec<usize>,
    center: Vec<f64>,
    half_width: Vec<f64>,
}

impl StateEncoder {
    pub fn new(profile: &Profile, slots: &[usize]) -> Result<Self> {
        if let Some(&s) = slots.iter().find(|&&s| s >= NUM_INPUTS) {
            return Err(Error::validation("slots", format!("slot {s} out of range")));
        }
        let (center, half_width) = slots
            .iter()
            .map(|&s| {
                let (lo, hi) = profile.slot_bounds(s);
                ((lo + hi) / 2.0, (hi - lo) / 2.0)
            })
            .unzip();
        Ok(StateEncoder {
            slots: slots.to_vec(),
            center,
            half_width,
        })
    }

    /// The 7 traffic rules.
    pub fn rules(profile: &Profile) -> Result<Self> {
        Self::new(profile, &[0, 1, 2, 3, 4, 5, 6])
    }

    /// The 7 traffic rules followed by one loading setting.
    pub fn rules_and(profile: &Profile, kind: LoadKind) -> Result<Self> {
        Self::new(profile, &[0, 1, 2, 3, 4, 5, 6, kind.slot()])
    }

    pub fn dim(&self) -> usize {
        self.slots.len()
    }

    pub fn encode(&self, state: &[f64]) -> Result<Vec<f64>> {
        if state.len() != self.dim() {
            return Err(Error::validation(
                "state",
                format!("expected {} values, got {}", self.dim(), state.len()),
            ));
        }
        Ok(state
            .iter()
            .zip(self.center.iter().zip(&self.half_width))
            .map(|(&x, (&c, &h))| if h > 0.0 { (x - c) / h } else { 0.0 })
            .collect())
    }
}

/// Epsilon-greedy choice. Draws one uniform number every call; below
/// `epsilon` a uniform index is drawn, otherwise the first maximal entry is
/// returned.
pub fn select_action(qvals: &[f64], epsilon: f64, rng: &mut impl Rng) -> usize {
    assert!(!qvals.is_empty(), "no actions to choose from");
    let u: f64 = rng.random();
    if u < epsilon {
        rng.random_range(0..qvals.len())
    } else {
        argmax(qvals)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Uniform pick used by the random baseline.
pub fn baseline_action(space: &ActionSpace, rng: &mut impl Rng) -> usize {
    rng.random_range(0..space.len())
}

/// Environment response to one 9-vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub qps: f64,
    pub p503: f64,
}

impl Outcome {
    pub fn reward(&self) -> f64 {
        reward_503(self.qps, self.p503)
    }
}

/// Anything that maps surrogate inputs to (qps, p503). `keys` identify
/// each interaction so that stochastic environments can be replayed.
pub trait Environment {
    fn respond(&self, inputs: &[[f64; NUM_INPUTS]], keys: &[u64]) -> Result<Vec<Outcome>>;
}

impl Environment for SurrogateModel {
    fn respond(&self, inputs: &[[f64; NUM_INPUTS]], _keys: &[u64]) -> Result<Vec<Outcome>> {
        Ok(self
            .predict_many(inputs)?
            .into_iter()
            .map(|[qps, p503]| Outcome { qps, p503 })
            .collect())
    }
}

/// The simulator itself as an environment; interaction `key` runs with seed
/// `seed ^ key`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshEnvironment {
    pub backend: BackendConfig,
    pub seed: u64,
}

impl Environment for MeshEnvironment {
    fn respond(&self, inputs: &[[f64; NUM_INPUTS]], keys: &[u64]) -> Result<Vec<Outcome>> {
        if inputs.len() != keys.len() {
            return Err(Error::validation("keys", "one key per input is required"));
        }
        inputs
            .iter()
            .zip(keys)
            .map(|(input, &key)| {
                let (rules, load) = decompose_inputs(input)?;
                let r = simulate(&rules, &load, &self.backend, self.seed ^ key)?;
                Ok(Outcome {
                    qps: r.qps,
                    p503: r.p503,
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reward_examples() {
        assert_eq!(reward_503(100.0, 0.3), 30.0);
        assert_eq!(reward_503(55.0, 0.0), 0.0);
        assert_eq!(reward_503(0.0, 1.0), 0.0);
        assert_eq!(reward_multi(0, &[10.0, 20.0], &[0.5, 0.5], 1.0).unwrap(), 12.5);
        assert_eq!(reward_multi(0, &[42.0], &[0.25], 0.0).unwrap(), reward_503(42.0, 0.25));
        assert!(reward_multi(0, &[1.0], &[0.5, 0.5], 1.0).is_err());
        assert!(reward_multi(2, &[1.0, 2.0], &[0.5, 0.5], 1.0).is_err());
    }

    #[test]
    fn preset_grids() {
        let s2 = Profile::s2();
        assert_eq!(ActionSpace::for_profile(&s2, LoadKind::Calls).unwrap().values, [100, 200, 300, 400]);
        assert_eq!(ActionSpace::for_profile(&s2, LoadKind::Threads).unwrap().values, [3, 4, 5, 6, 7]);
        let s1 = ActionSpace::for_profile(&Profile::s1(), LoadKind::Calls).unwrap();
        assert_eq!((s1.len(), s1.values[0], s1.values[15]), (16, 435, 450));
        let lens: Vec<_> = Profile::all()
            .iter()
            .map(|p| {
                (
                    ActionSpace::for_profile(p, LoadKind::Threads).unwrap().len(),
                    ActionSpace::for_profile(p, LoadKind::Calls).unwrap().len(),
                )
            })
            .collect();
        assert_eq!(lens, [(5, 16), (5, 4), (7, 10), (7, 8), (5, 11)]);
    }

    #[test]
    fn custom_profile_grid_covers_range() {
        let mut p = Profile::s3();
        p.name = "wide".into();
        let calls = ActionSpace::for_profile(&p, LoadKind::Calls).unwrap();
        assert_eq!(calls.values, [50, 95, 140, 185, 230, 275, 320, 365, 410, 455, 500]);
        let threads = ActionSpace::for_profile(&p, LoadKind::Threads).unwrap();
        assert_eq!(threads.values, (10..=16).collect::<Vec<_>>());
        p.name = "S2".into();
        assert!(ActionSpace::for_profile(&p, LoadKind::Threads).is_err());
    }

    #[test]
    fn action_space_invariants() {
        assert!(ActionSpace::new(LoadKind::Calls, vec![]).is_err());
        assert!(ActionSpace::new(LoadKind::Calls, vec![2, 2]).is_err());
        assert!(ActionSpace::new(LoadKind::Calls, vec![3, 1]).is_err());
    }

    #[test]
    fn encoder_maps_range_to_unit_interval() {
        let enc = StateEncoder::rules_and(&Profile::s2(), LoadKind::Calls).unwrap();
        let lo = enc.encode(&[3.0, 3.0, 3.0, 180.0, 100.0, 1.0, 1.0, 100.0]).unwrap();
        let hi = enc.encode(&[7.0, 7.0, 7.0, 180.0, 100.0, 1.0, 1.0, 700.0]).unwrap();
        assert_eq!(lo, [-1.0, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0]);
        assert_eq!(hi, [1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(enc.encode(&[0.0; 7]).is_err());
    }

    #[test]
    fn greedy_selection_and_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_action(&[1.0, 3.0, 2.0], 0.0, &mut rng), 1);
        assert_eq!(select_action(&[5.0, 5.0, 5.0], 0.0, &mut rng), 0);
        assert_eq!(select_action(&[-1.0, 4.0, 4.0], 0.0, &mut rng), 1);
    }

    #[test]
    fn full_exploration_sequence_is_frozen() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let picks: Vec<usize> = (0..10).map(|_| select_action(&[0.0; 5], 1.0, &mut rng)).collect();
        let mut again = ChaCha8Rng::seed_from_u64(2024);
        let repeat: Vec<usize> = (0..10).map(|_| select_action(&[0.0; 5], 1.0, &mut again)).collect();
        assert_eq!(picks, repeat);
        assert_eq!(picks, FROZEN_PICKS);
    }

    const FROZEN_PICKS: [usize; 10] = [4, 3, 1, 2, 2, 2, 1, 3, 3, 3];

    #[test]
    fn baseline_frequencies_are_uniform() {
        let space = ActionSpace::new(LoadKind::Threads, vec![1, 2, 3, 4, 5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            counts[baseline_action(&space, &mut rng)] += 1;
        }
        for c in counts {
            assert!((c as f64 / 10_000.0 - 0.2).abs() < 0.05 * 0.2, "{counts:?}");
        }
        let single = ActionSpace::new(LoadKind::Threads, vec![4]).unwrap();
        assert!((0..50).all(|_| baseline_action(&single, &mut rng) == 0));
    }

    #[test]
    fn mesh_environment_replays_by_key() {
        let env = MeshEnvironment {
            backend: BackendConfig::default(),
            seed: 11,
        };
        let x = [4.0, 4.0, 4.0, 180.0, 100.0, 1.0, 1.0, 3.0, 300.0];
        let a = env.respond(&[x, x], &[5, 6]).unwrap();
        let b = env.respond(&[x], &[5]).unwrap();
        assert_eq!(a[0], b[0]);
        let (rules, load) = decompose_inputs(&x).unwrap();
        let direct = simulate(&rules, &load, &BackendConfig::default(), 11 ^ 6).unwrap();
        assert_eq!(a[1].p503, direct.p503);
        assert_eq!(a[1].qps, direct.qps);
    }
}
