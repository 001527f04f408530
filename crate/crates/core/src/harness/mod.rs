//! Experiment runs: the training loop against an environment, the random
//! baseline on the same states, the rolling reward ratio, replay of the
//! best window through the simulator, and report files.

mod report;

pub use report::{
    emit_report, load_run, save_run, write_curves, RunFile, Summary, CURVES_HEADER,
};

use std::collections::VecDeque;
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{
    baseline_action, round_reward, run_round_collab, run_round_multi, run_round_single,
    ActionSpace, AgentNet, CollabNets, Environment, MeshEnvironment, MultiMode, RoundContext,
    RoundRecord, Service, StateEncoder, UpdateRule,
};
use crate::datagen::{sample_config, LoadKind, Profile};
use crate::error::{Error, Result};
use crate::mesh_sim::BackendConfig;
use crate::surrogate::{concat_input, load_model, SurrogateModel};

/// Epochs in each reward-ratio window.
pub const ROLLING_WINDOW: usize = 25;
pub const DESK_EPOCHS: usize = 60;
pub const DESK_INTERACTIONS: usize = 200;
const CALIBRATION_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Paradigm {
    SingleThread,
    #[default]
    SingleCall,
    Independent,
    ThreadCall,
    CallThread,
    CollabCall,
    CollabThread,
    CollabBoth,
}

impl Paradigm {
    pub const ALL: [Paradigm; 8] = [
        Paradigm::SingleThread,
        Paradigm::SingleCall,
        Paradigm::Independent,
        Paradigm::ThreadCall,
        Paradigm::CallThread,
        Paradigm::CollabCall,
        Paradigm::CollabThread,
        Paradigm::CollabBoth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Paradigm::SingleThread => "single-thread",
            Paradigm::SingleCall => "single-call",
            Paradigm::Independent => "independent",
            Paradigm::ThreadCall => "thread-call",
            Paradigm::CallThread => "call-thread",
            Paradigm::CollabCall => "collab-call",
            Paradigm::CollabThread => "collab-thread",
            Paradigm::CollabBoth => "collab-both",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::validation("paradigm", format!("unknown paradigm {name:?}")))
    }

    pub fn is_collaborative(self) -> bool {
        matches!(self, Paradigm::CollabCall | Paradigm::CollabThread | Paradigm::CollabBoth)
    }

    /// Loading settings decided by agents.
    pub fn controlled(self) -> &'static [LoadKind] {
        match self {
            Paradigm::SingleThread | Paradigm::CollabThread => &[LoadKind::Threads],
            Paradigm::SingleCall | Paradigm::CollabCall => &[LoadKind::Calls],
            _ => &[LoadKind::Threads, LoadKind::Calls],
        }
    }

    /// State size of each agent of one service, thread agent first.
    pub fn state_dims(self) -> Vec<usize> {
        match self {
            Paradigm::SingleThread | Paradigm::SingleCall => vec![8],
            Paradigm::CollabCall | Paradigm::CollabThread => vec![8],
            Paradigm::Independent | Paradigm::CollabBoth => vec![7, 7],
            Paradigm::ThreadCall => vec![7, 8],
            Paradigm::CallThread => vec![8, 7],
        }
    }
}

impl std::fmt::Display for Paradigm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything that determines one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub paradigm: Paradigm,
    /// One profile per service, or a single profile shared by all.
    pub profiles: Vec<String>,
    /// One trained model per service. Ignored when `oracle` is set.
    pub surrogates: Vec<PathBuf>,
    /// Interact with the simulator directly instead of the models.
    pub oracle: bool,
    pub epochs: usize,
    pub interactions: usize,
    /// Replace `epochs` and `interactions` with 60 x 200.
    pub desk_scale: bool,
    pub repeats: usize,
    pub seed: u64,
    /// Weight of the mean service reward in collaborative rewards.
    pub beta: f64,
    pub update_rule: UpdateRule,
    /// Return discount for policy-gradient updates.
    pub alpha: f64,
    /// Rounds per policy-gradient update.
    pub reinforce_horizon: usize,
    pub snet_aux: bool,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub backend: BackendConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            paradigm: Paradigm::SingleCall,
            profiles: vec!["S2".into()],
            surrogates: Vec::new(),
            oracle: false,
            epochs: 500,
            interactions: 1000,
            desk_scale: false,
            repeats: 3,
            seed: 0,
            beta: 0.5,
            update_rule: UpdateRule::QRegression,
            alpha: 0.9,
            reinforce_horizon: 10,
            snet_aux: false,
            epsilon_start: 0.3,
            epsilon_end: 0.02,
            backend: BackendConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Effective `(epochs, interactions)`.
    pub fn schedule(&self) -> (usize, usize) {
        if self.desk_scale {
            (DESK_EPOCHS, DESK_INTERACTIONS)
        } else {
            (self.epochs, self.interactions)
        }
    }

    pub fn services(&self) -> usize {
        if self.paradigm.is_collaborative() {
            let models = if self.oracle { 0 } else { self.surrogates.len() };
            models.max(self.profiles.len())
        } else {
            1
        }
    }

    /// Resolved profile of every service.
    pub fn service_profiles(&self) -> Result<Vec<Profile>> {
        let n = self.services();
        match self.profiles.len() {
            1 => Ok(vec![Profile::by_name(&self.profiles[0])?; n]),
            len if len == n => self.profiles.iter().map(|p| Profile::by_name(p)).collect(),
            len => Err(Error::validation(
                "profiles",
                format!("{len} profiles for {n} services; give one or one per service"),
            )),
        }
    }

    /// Collaborative weight used in rewards, if any.
    pub fn reward_beta(&self) -> Option<f64> {
        self.paradigm.is_collaborative().then_some(self.beta)
    }

    pub fn validate(&self) -> Result<()> {
        let (epochs, interactions) = self.schedule();
        if epochs < ROLLING_WINDOW {
            return Err(Error::validation(
                "epochs",
                format!("must be >= the {ROLLING_WINDOW}-epoch window, got {epochs}"),
            ));
        }
        if interactions == 0 {
            return Err(Error::validation("interactions", "must be >= 1"));
        }
        if (epochs as u64).saturating_mul(interactions as u64) >= 1 << 40 {
            return Err(Error::validation("interactions", "run is too long"));
        }
        if self.repeats == 0 || self.repeats >= 1 << 15 {
            return Err(Error::validation("repeats", "must be in 1..32768"));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::validation("beta", format!("must be finite and >= 0, got {}", self.beta)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::validation("alpha", format!("must lie in [0, 1], got {}", self.alpha)));
        }
        for (field, e) in [("epsilon_start", self.epsilon_start), ("epsilon_end", self.epsilon_end)] {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::validation(field, format!("must lie in [0, 1], got {e}")));
            }
        }
        if self.reinforce_horizon == 0 {
            return Err(Error::validation("reinforce_horizon", "must be >= 1"));
        }
        if self.paradigm.is_collaborative() && self.update_rule == UpdateRule::Reinforce {
            return Err(Error::validation(
                "update_rule",
                "collaborative paradigms support only qreg",
            ));
        }
        if self.snet_aux && !self.paradigm.is_collaborative() {
            return Err(Error::validation("snet_aux", "needs a collaborative paradigm"));
        }
        if self.profiles.is_empty() {
            return Err(Error::validation("profiles", "at least one profile is required"));
        }
        let n = self.services();
        if n >= 128 {
            return Err(Error::validation("profiles", "at most 127 services"));
        }
        if !self.oracle && self.surrogates.len() != n {
            return Err(Error::validation(
                "surrogates",
                format!("{} models for {n} services", self.surrogates.len()),
            ));
        }
        for p in self.service_profiles()? {
            p.validate()?;
            for &kind in self.paradigm.controlled() {
                ActionSpace::for_profile(&p, kind)?;
            }
        }
        self.backend.validate()
    }

    /// The environments of every service: loaded models, or the simulator
    /// seeded with `seed` in oracle mode.
    pub fn environments(&self) -> Result<Vec<Box<dyn Environment>>> {
        self.validate()?;
        let profiles = self.service_profiles()?;
        if self.oracle {
            return Ok((0..profiles.len())
                .map(|_| {
                    Box::new(MeshEnvironment {
                        backend: self.backend.clone(),
                        seed: self.seed,
                    }) as Box<dyn Environment>
                })
                .collect());
        }
        self.surrogates
            .iter()
            .zip(&profiles)
            .map(|(path, profile)| {
                let model: SurrogateModel = load_model(path)?;
                if !model.profile.is_empty() && !model.profile.eq_ignore_ascii_case(&profile.name) {
                    return Err(Error::validation(
                        "surrogates",
                        format!(
                            "{} was trained on {}, not {}",
                            path.display(),
                            model.profile,
                            profile.name
                        ),
                    ));
                }
                Ok(Box::new(model) as Box<dyn Environment>)
            })
            .collect()
    }
}

/// The rounds of one epoch, in order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub rounds: Vec<RoundRecord>,
}

/// Outcome of one repeat.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub repeat: usize,
    /// Per-epoch sum of the agents' rewards.
    pub rl_cum_reward: Vec<f64>,
    /// Per-epoch sum of the random baseline's rewards on the same states.
    pub base_cum_reward: Vec<f64>,
    /// Window ratio ending at each epoch; empty before the first full window.
    pub rolling_ratio: Vec<Option<f64>>,
    pub best_epoch: usize,
    pub simulated_ratio: f64,
    pub validated_ratio: Option<f64>,
    /// Every interaction of the window ending at `best_epoch`.
    pub best_window: Vec<EpochLog>,
    #[serde(skip)]
    pub wall_clock_s: f64,
}

/// `mean(rl) / mean(base)` over one window.
pub fn window_ratio(rl: &[f64], base: &[f64]) -> Result<f64> {
    if rl.len() != base.len() || rl.is_empty() {
        return Err(Error::Metric(format!(
            "window lengths differ or are empty: {} vs {}",
            rl.len(),
            base.len()
        )));
    }
    let n = rl.len() as f64;
    let base_mean = base.iter().sum::<f64>() / n;
    if base_mean == 0.0 || !base_mean.is_finite() {
        return Err(Error::Metric(format!("baseline window mean is {base_mean}")));
    }
    Ok(rl.iter().sum::<f64>() / n / base_mean)
}

/// Ratio for every epoch `e >= window - 1` over epochs `e-window+1..=e`,
/// and the first maximum with its epoch.
pub fn rolling_ratio(rl: &[f64], base: &[f64], window: usize) -> Result<(Vec<Option<f64>>, f64, usize)> {
    if rl.len() != base.len() {
        return Err(Error::Metric("series lengths differ".into()));
    }
    if window == 0 || rl.len() < window {
        return Err(Error::Metric(format!(
            "need at least {window} epochs, got {}",
            rl.len()
        )));
    }
    let mut series = vec![None; window - 1];
    let (mut best, mut best_epoch) = (f64::NEG_INFINITY, 0);
    for e in window - 1..rl.len() {
        let r = window_ratio(&rl[e + 1 - window..=e], &base[e + 1 - window..=e])?;
        if r > best {
            best = r;
            best_epoch = e;
        }
        series.push(Some(r));
    }
    Ok((series, best, best_epoch))
}

fn stream(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn repeat_seed(seed: u64, repeat: usize) -> u64 {
    seed.wrapping_add((repeat as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

enum Learner {
    Single(Box<AgentNet>),
    Multi(Box<AgentNet>, Box<AgentNet>, MultiMode),
    Collab(Vec<CollabNets>),
}

impl Learner {
    fn build(config: &ExperimentConfig, profiles: &[Profile], seed: u64) -> Result<Self> {
        let p = &profiles[0];
        let agent = |state: Option<LoadKind>, kind: LoadKind, s: u64| -> Result<Box<AgentNet>> {
            let enc = match state {
                Some(k) => StateEncoder::rules_and(p, k)?,
                None => StateEncoder::rules(p)?,
            };
            let mut a = AgentNet::new(enc, ActionSpace::for_profile(p, kind)?, s)?;
            a.rule = config.update_rule;
            a.alpha = config.alpha;
            a.horizon = config.reinforce_horizon;
            Ok(Box::new(a))
        };
        let collab = |kind: LoadKind, state: Option<LoadKind>, s: u64| -> Result<CollabNets> {
            let mut encoders = Vec::with_capacity(profiles.len());
            let mut spaces = Vec::with_capacity(profiles.len());
            for p in profiles {
                encoders.push(match state {
                    Some(k) => StateEncoder::rules_and(p, k)?,
                    None => StateEncoder::rules(p)?,
                });
                spaces.push(ActionSpace::for_profile(p, kind)?);
            }
            CollabNets::new(encoders, spaces, s, config.snet_aux)
        };
        use LoadKind::{Calls, Threads};
        Ok(match config.paradigm {
            Paradigm::SingleThread => Learner::Single(agent(Some(Calls), Threads, seed)?),
            Paradigm::SingleCall => Learner::Single(agent(Some(Threads), Calls, seed)?),
            Paradigm::Independent => Learner::Multi(
                agent(None, Threads, seed)?,
                agent(None, Calls, seed + 1)?,
                MultiMode::Independent,
            ),
            Paradigm::ThreadCall => Learner::Multi(
                agent(None, Threads, seed)?,
                agent(Some(Threads), Calls, seed + 1)?,
                MultiMode::ThreadCall,
            ),
            Paradigm::CallThread => Learner::Multi(
                agent(Some(Calls), Threads, seed)?,
                agent(None, Calls, seed + 1)?,
                MultiMode::CallThread,
            ),
            Paradigm::CollabCall => Learner::Collab(vec![collab(Calls, Some(Threads), seed)?]),
            Paradigm::CollabThread => Learner::Collab(vec![collab(Threads, Some(Calls), seed)?]),
            Paradigm::CollabBoth => Learner::Collab(vec![
                collab(Threads, None, seed)?,
                collab(Calls, None, seed + 1000)?,
            ]),
        })
    }

    fn set_epsilon(&mut self, epsilon: f64) {
        match self {
            Learner::Single(a) => a.epsilon = epsilon,
            Learner::Multi(t, c, _) => {
                t.epsilon = epsilon;
                c.epsilon = epsilon;
            }
            Learner::Collab(groups) => groups.iter_mut().for_each(|g| g.epsilon = epsilon),
        }
    }

    fn round(
        &mut self,
        services: &[Service<'_>],
        beta: f64,
        ctx: &mut RoundContext<'_>,
    ) -> Result<crate::agents::RoundOutcome> {
        match self {
            Learner::Single(a) => run_round_single(a, services[0], ctx),
            Learner::Multi(t, c, mode) => run_round_multi(t, c, *mode, services[0], ctx),
            Learner::Collab(groups) => run_round_collab(groups, services, beta, ctx),
        }
    }
}

/// Mean per-service reward of uniformly random actions, used to bring
/// learning targets to order one. Falls back to 1 when that mean is not
/// positive.
pub fn calibrate_reward_scale(
    paradigm: Paradigm,
    services: &[Service<'_>],
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    let mut count = 0usize;
    for i in 0..CALIBRATION_SAMPLES {
        for (n, service) in services.iter().enumerate() {
            let (rules, load) = sample_config(service.profile, &mut rng);
            let mut actions = Vec::new();
            for &kind in paradigm.controlled() {
                let space = ActionSpace::for_profile(service.profile, kind)?;
                let pick = baseline_action(&space, &mut rng);
                actions.push((kind, space.value(pick)));
            }
            let state_load = match paradigm.controlled() {
                [kind] => Some(kind.other()),
                _ => None,
            };
            let mut state = rules.to_array().to_vec();
            if let Some(k) = state_load {
                state.push(k.value_of(&load) as f64);
            }
            let x = concat_input(&state, state_load, &actions)?;
            let key = 1 << 63 | (i as u64) << 8 | (n as u64) << 1;
            total += service.env.respond(&[x], &[key])?[0].reward();
            count += 1;
        }
    }
    let mean = total / count as f64;
    Ok(if mean.is_finite() && mean > 0.0 { mean } else { 1.0 })
}

/// Runs one repeat against the given environments (one per service).
pub fn run_experiment(
    config: &ExperimentConfig,
    envs: &[&dyn Environment],
    repeat: usize,
) -> Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let profiles = config.service_profiles()?;
    if envs.len() != profiles.len() {
        return Err(Error::validation(
            "environments",
            format!("{} environments for {} services", envs.len(), profiles.len()),
        ));
    }
    let services: Vec<Service> = profiles
        .iter()
        .zip(envs)
        .map(|(profile, &env)| Service { profile, env })
        .collect();
    let (epochs, interactions) = config.schedule();
    let seed = repeat_seed(config.seed, repeat);
    let mut state_rng = ChaCha8Rng::seed_from_u64(stream(seed, 1));
    let mut baseline_rng = ChaCha8Rng::seed_from_u64(stream(seed, 2));
    let mut learner = Learner::build(config, &profiles, stream(seed, 3))?;
    let reward_scale = calibrate_reward_scale(config.paradigm, &services, stream(seed, 4))?;
    let beta = config.beta;
    let total_rounds = epochs * interactions;

    let mut rl_series = Vec::with_capacity(epochs);
    let mut base_series = Vec::with_capacity(epochs);
    let mut ratios = vec![None; ROLLING_WINDOW - 1];
    let mut ring: VecDeque<EpochLog> = VecDeque::with_capacity(ROLLING_WINDOW);
    let mut best = (f64::NEG_INFINITY, 0usize, Vec::new());

    for epoch in 0..epochs {
        let mut rl_sum = 0.0;
        let mut base_sum = 0.0;
        let mut rounds = Vec::with_capacity(interactions);
        for i in 0..interactions {
            let t = epoch * interactions + i;
            let frac = if total_rounds > 1 {
                t as f64 / (total_rounds - 1) as f64
            } else {
                0.0
            };
            learner.set_epsilon(config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac);
            let mut ctx = RoundContext {
                state_rng: &mut state_rng,
                baseline_rng: &mut baseline_rng,
                key: (repeat as u64) << 48 | (t as u64) << 8,
                reward_scale,
            };
            let out = learner.round(&services, beta, &mut ctx)?;
            rl_sum += out.rl_reward;
            base_sum += out.baseline_reward;
            rounds.push(out.record);
        }
        rl_series.push(rl_sum);
        base_series.push(base_sum);
        if ring.len() == ROLLING_WINDOW {
            ring.pop_front();
        }
        ring.push_back(EpochLog { epoch, rounds });
        if epoch + 1 >= ROLLING_WINDOW {
            let lo = epoch + 1 - ROLLING_WINDOW;
            let r = window_ratio(&rl_series[lo..], &base_series[lo..])?;
            if !r.is_finite() {
                return Err(Error::numeric("rolling ratio", format!("epoch {epoch} gave {r}")));
            }
            ratios.push(Some(r));
            if r > best.0 {
                best = (r, epoch, ring.iter().cloned().collect());
            }
        }
    }

    Ok(RunReport {
        repeat,
        rl_cum_reward: rl_series,
        base_cum_reward: base_series,
        rolling_ratio: ratios,
        best_epoch: best.1,
        simulated_ratio: best.0,
        validated_ratio: None,
        best_window: best.2,
        wall_clock_s: started.elapsed().as_secs_f64(),
    })
}

/// Replays every agent and baseline input of the best window through the
/// simulator (interaction `key` runs with seed `seed ^ key`) and returns
/// the window ratio of the replayed rewards.
pub fn validate_best(report: &RunReport, config: &ExperimentConfig, seed: u64) -> Result<f64> {
    if report.best_window.is_empty() {
        return Err(Error::validation("best_window", "report has no logged window"));
    }
    let env = MeshEnvironment {
        backend: config.backend.clone(),
        seed,
    };
    let beta = config.reward_beta();
    let mut rl = Vec::with_capacity(report.best_window.len());
    let mut base = Vec::with_capacity(report.best_window.len());
    for epoch in &report.best_window {
        let (mut rl_sum, mut base_sum) = (0.0, 0.0);
        for round in &epoch.rounds {
            let mut outs = Vec::with_capacity(round.steps.len());
            let mut bases = Vec::with_capacity(round.steps.len());
            for step in &round.steps {
                let r = env.respond(&[step.agent, step.baseline], &[step.agent_key(), step.baseline_key()])?;
                outs.push(r[0]);
                bases.push(r[1]);
            }
            rl_sum += round_reward(&outs, beta)?;
            base_sum += round_reward(&bases, beta)?;
        }
        rl.push(rl_sum);
        base.push(base_sum);
    }
    window_ratio(&rl, &base)
}

/// Element-wise means over repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub repeats: usize,
    pub simulated_ratio: f64,
    pub validated_ratio: Option<f64>,
    pub rl_cum_reward: Vec<f64>,
    pub base_cum_reward: Vec<f64>,
    pub rolling_ratio: Vec<Option<f64>>,
}

pub fn aggregate_repeats(reports: &[RunReport]) -> Result<Aggregate> {
    let first = reports
        .first()
        .ok_or_else(|| Error::validation("reports", "nothing to aggregate"))?;
    let len = first.rl_cum_reward.len();
    if reports.iter().any(|r| {
        r.rl_cum_reward.len() != len || r.base_cum_reward.len() != len || r.rolling_ratio.len() != len
    }) {
        return Err(Error::validation("reports", "series lengths differ between repeats"));
    }
    let n = reports.len() as f64;
    let mean_of = |f: &dyn Fn(&RunReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    let validated = if reports.iter().all(|r| r.validated_ratio.is_some()) {
        Some(mean_of(&|r| r.validated_ratio.unwrap()))
    } else {
        None
    };
    Ok(Aggregate {
        repeats: reports.len(),
        simulated_ratio: mean_of(&|r| r.simulated_ratio),
        validated_ratio: validated,
        rl_cum_reward: (0..len).map(|e| mean_of(&|r| r.rl_cum_reward[e])).collect(),
        base_cum_reward: (0..len).map(|e| mean_of(&|r| r.base_cum_reward[e])).collect(),
        rolling_ratio: (0..len)
            .map(|e| {
                reports
                    .iter()
                    .map(|r| r.rolling_ratio[e])
                    .sum::<Option<f64>>()
                    .map(|s| s / n)
            })
            .collect(),
    })
}

/// Runs every repeat of `config`, validating each against the simulator
/// with the config seed.
pub fn run_all(config: &ExperimentConfig) -> Result<RunFile> {
    let envs = config.environments()?;
    let env_refs: Vec<&dyn Environment> = envs.iter().map(|e| e.as_ref()).collect();
    let mut reports = Vec::with_capacity(config.repeats);
    for repeat in 0..config.repeats {
        reports.push(run_experiment(config, &env_refs, repeat)?);
    }
    Ok(RunFile {
        config: config.clone(),
        reports,
    })
}
