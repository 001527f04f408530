use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{baseline_action, reward_multi, AgentNet, CollabNets, Environment, Outcome};
use crate::datagen::{sample_config, LoadKind, Profile, NUM_INPUTS};
use crate::error::{Error, Result};
use crate::surrogate::concat_input;

/// Ordering of a thread agent and a call agent within one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiMode {
    /// Both agents see the 7 rules and act together.
    Independent,
    /// The call agent sees the rules plus the chosen thread count.
    ThreadCall,
    /// The thread agent sees the rules plus the chosen call count.
    CallThread,
}

/// One service with the environment that answers for it.
#[derive(Clone, Copy)]
pub struct Service<'a> {
    pub profile: &'a Profile,
    pub env: &'a dyn Environment,
}

/// Per-round randomness and bookkeeping shared by all round functions.
pub struct RoundContext<'a> {
    pub state_rng: &'a mut ChaCha8Rng,
    pub baseline_rng: &'a mut ChaCha8Rng,
    /// Interaction key; its low 8 bits must be zero. Service `n` uses
    /// `key | n << 1` for the agent and `key | n << 1 | 1` for the baseline.
    pub key: u64,
    /// Rewards are divided by this before they become learning targets.
    pub reward_scale: f64,
}

/// The inputs sent to the environment for one service in one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceStep {
    pub key: u64,
    pub agent: [f64; NUM_INPUTS],
    pub baseline: [f64; NUM_INPUTS],
}

impl ServiceStep {
    pub fn agent_key(&self) -> u64 {
        self.key
    }

    pub fn baseline_key(&self) -> u64 {
        self.key | 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub steps: Vec<ServiceStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub record: RoundRecord,
    pub rl_reward: f64,
    pub baseline_reward: f64,
}

/// Total reward of one round: the plain product reward summed over
/// services, or with `beta` the collaborative reward of every service.
pub fn round_reward(outcomes: &[Outcome], beta: Option<f64>) -> Result<f64> {
    match beta {
        None => Ok(outcomes.iter().map(Outcome::reward).sum()),
        Some(beta) => {
            let qps: Vec<f64> = outcomes.iter().map(|o| o.qps).collect();
            let p503: Vec<f64> = outcomes.iter().map(|o| o.p503).collect();
            (0..outcomes.len())
                .map(|n| reward_multi(n, &qps, &p503, beta))
                .sum()
        }
    }
}

fn service_key(ctx: &RoundContext<'_>, n: usize) -> u64 {
    ctx.key | (n as u64) << 1
}

fn query(service: &Service<'_>, step: &ServiceStep) -> Result<(Outcome, Outcome)> {
    let out = service
        .env
        .respond(&[step.agent, step.baseline], &[step.agent_key(), step.baseline_key()])?;
    match out.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::numeric("environment", "expected one outcome per input")),
    }
}

fn rules_and(rules: [f64; 7], value: f64) -> Vec<f64> {
    let mut s = rules.to_vec();
    s.push(value);
    s
}

/// One interaction of a single agent: the state is the 7 rules plus the
/// loading setting the agent does not control.
pub fn run_round_single(
    agent: &mut AgentNet,
    service: Service<'_>,
    ctx: &mut RoundContext<'_>,
) -> Result<RoundOutcome> {
    if agent.state_dim() != 8 {
        return Err(Error::validation(
            "agent",
            format!("single agent needs an 8-value state, has {}", agent.state_dim()),
        ));
    }
    let kind = agent.space.kind;
    let other = kind.other();
    let (rules, load) = sample_config(service.profile, ctx.state_rng);
    let state = rules_and(rules.to_array(), other.value_of(&load) as f64);
    let a = agent.act(&state)?;
    let b = baseline_action(&agent.space, ctx.baseline_rng);
    let step = ServiceStep {
        key: service_key(ctx, 0),
        agent: concat_input(&state, Some(other), &[(kind, agent.space.value(a))])?,
        baseline: concat_input(&state, Some(other), &[(kind, agent.space.value(b))])?,
    };
    let (out, base) = query(&service, &step)?;
    let rl_reward = round_reward(&[out], None)?;
    let baseline_reward = round_reward(&[base], None)?;
    agent.learn(&state, a, rl_reward / ctx.reward_scale)?;
    Ok(RoundOutcome {
        record: RoundRecord { steps: vec![step] },
        rl_reward,
        baseline_reward,
    })
}

/// One interaction of a thread agent and a call agent sharing one reward.
pub fn run_round_multi(
    thread: &mut AgentNet,
    call: &mut AgentNet,
    mode: MultiMode,
    service: Service<'_>,
    ctx: &mut RoundContext<'_>,
) -> Result<RoundOutcome> {
    if thread.space.kind != LoadKind::Threads || call.space.kind != LoadKind::Calls {
        return Err(Error::validation("agents", "expected a thread agent and a call agent"));
    }
    let (thread_dim, call_dim) = match mode {
        MultiMode::Independent => (7, 7),
        MultiMode::ThreadCall => (7, 8),
        MultiMode::CallThread => (8, 7),
    };
    if thread.state_dim() != thread_dim || call.state_dim() != call_dim {
        return Err(Error::validation(
            "agents",
            format!(
                "{mode:?} needs state sizes ({thread_dim}, {call_dim}), got ({}, {})",
                thread.state_dim(),
                call.state_dim()
            ),
        ));
    }
    let (rules, _) = sample_config(service.profile, ctx.state_rng);
    let rules7 = rules.to_array();
    let (thread_state, call_state, at, ac) = match mode {
        MultiMode::Independent => {
            let s = rules7.to_vec();
            let at = thread.act(&s)?;
            let ac = call.act(&s)?;
            (s.clone(), s, at, ac)
        }
        MultiMode::ThreadCall => {
            let ts = rules7.to_vec();
            let at = thread.act(&ts)?;
            let cs = rules_and(rules7, thread.space.value(at));
            let ac = call.act(&cs)?;
            (ts, cs, at, ac)
        }
        MultiMode::CallThread => {
            let cs = rules7.to_vec();
            let ac = call.act(&cs)?;
            let ts = rules_and(rules7, call.space.value(ac));
            let at = thread.act(&ts)?;
            (ts, cs, at, ac)
        }
    };
    let bt = baseline_action(&thread.space, ctx.baseline_rng);
    let bc = baseline_action(&call.space, ctx.baseline_rng);
    let pair = |t: usize, c: usize| {
        [
            (LoadKind::Threads, thread.space.value(t)),
            (LoadKind::Calls, call.space.value(c)),
        ]
    };
    let step = ServiceStep {
        key: service_key(ctx, 0),
        agent: concat_input(&rules7, None, &pair(at, ac))?,
        baseline: concat_input(&rules7, None, &pair(bt, bc))?,
    };
    let (out, base) = query(&service, &step)?;
    let rl_reward = round_reward(&[out], None)?;
    let baseline_reward = round_reward(&[base], None)?;
    let target = rl_reward / ctx.reward_scale;
    thread.learn(&thread_state, at, target)?;
    call.learn(&call_state, ac, target)?;
    Ok(RoundOutcome {
        record: RoundRecord { steps: vec![step] },
        rl_reward,
        baseline_reward,
    })
}

/// One interaction of every service. `groups` holds either one block set
/// of a single agent kind (8-value states) or a thread group followed by a
/// call group (7-value states).
pub fn run_round_collab(
    groups: &mut [CollabNets],
    services: &[Service<'_>],
    beta: f64,
    ctx: &mut RoundContext<'_>,
) -> Result<RoundOutcome> {
    let n = services.len();
    if n == 0 || groups.iter().any(|g| g.services() != n) {
        return Err(Error::validation(
            "services",
            "every block set needs one private block per service",
        ));
    }
    let kinds: Vec<LoadKind> = groups.iter().map(|g| g.spaces[0].kind).collect();
    let expected_dim = match kinds.as_slice() {
        [_] => 8,
        [LoadKind::Threads, LoadKind::Calls] => 7,
        _ => {
            return Err(Error::validation(
                "groups",
                "expected one block set, or a thread set followed by a call set",
            ))
        }
    };
    if groups.iter().any(|g| g.state_dim() != expected_dim) {
        return Err(Error::validation(
            "groups",
            format!("collaborative states here have {expected_dim} values"),
        ));
    }

    let mut states = Vec::with_capacity(n);
    for service in services {
        let (rules, load) = sample_config(service.profile, ctx.state_rng);
        states.push(match kinds.as_slice() {
            [kind] => rules_and(rules.to_array(), kind.other().value_of(&load) as f64),
            _ => rules.to_array().to_vec(),
        });
    }
    let actions: Vec<Vec<usize>> = groups
        .iter_mut()
        .map(|g| g.act(&states))
        .collect::<Result<_>>()?;
    let mut baseline = vec![Vec::with_capacity(n); groups.len()];
    for s in 0..n {
        for (g, group) in groups.iter().enumerate() {
            baseline[g].push(baseline_action(&group.spaces[s], ctx.baseline_rng));
        }
    }

    let mut steps = Vec::with_capacity(n);
    let mut outs = Vec::with_capacity(n);
    let mut bases = Vec::with_capacity(n);
    for (s, service) in services.iter().enumerate() {
        let chosen = |picks: &[Vec<usize>]| -> Vec<(LoadKind, f64)> {
            groups
                .iter()
                .zip(picks)
                .map(|(g, p)| (g.spaces[s].kind, g.spaces[s].value(p[s])))
                .collect()
        };
        let state_load = match kinds.as_slice() {
            [kind] => Some(kind.other()),
            _ => None,
        };
        let step = ServiceStep {
            key: service_key(ctx, s),
            agent: concat_input(&states[s], state_load, &chosen(&actions))?,
            baseline: concat_input(&states[s], state_load, &chosen(&baseline))?,
        };
        let (out, base) = query(service, &step)?;
        steps.push(step);
        outs.push(out);
        bases.push(base);
    }

    let qps: Vec<f64> = outs.iter().map(|o| o.qps).collect();
    let p503: Vec<f64> = outs.iter().map(|o| o.p503).collect();
    let targets: Vec<f64> = (0..n)
        .map(|s| Ok(reward_multi(s, &qps, &p503, beta)? / ctx.reward_scale))
        .collect::<Result<_>>()?;
    for (group, acts) in groups.iter_mut().zip(&actions) {
        group.update(&states, acts, &targets)?;
        group.observe_states(&states)?;
    }
    Ok(RoundOutcome {
        record: RoundRecord { steps },
        rl_reward: round_reward(&outs, Some(beta))?,
        baseline_reward: round_reward(&bases, Some(beta))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{ActionSpace, MeshEnvironment, StateEncoder};
    use crate::mesh_sim::BackendConfig;
    use rand::SeedableRng;

    /// Constant response regardless of input.
    struct Flat(Outcome);

    impl Environment for Flat {
        fn respond(&self, inputs: &[[f64; NUM_INPUTS]], _keys: &[u64]) -> Result<Vec<Outcome>> {
            Ok(vec![self.0; inputs.len()])
        }
    }

    /// Reward grows with the call count.
    struct CallsReward;

    impl Environment for CallsReward {
        fn respond(&self, inputs: &[[f64; NUM_INPUTS]], _keys: &[u64]) -> Result<Vec<Outcome>> {
            Ok(inputs
                .iter()
                .map(|x| Outcome {
                    qps: x[8],
                    p503: 0.5,
                })
                .collect())
        }
    }

    fn rngs() -> (ChaCha8Rng, ChaCha8Rng) {
        (ChaCha8Rng::seed_from_u64(1), ChaCha8Rng::seed_from_u64(2))
    }

    fn agent(p: &Profile, kind: LoadKind, state: Option<LoadKind>, seed: u64) -> AgentNet {
        let enc = match state {
            Some(k) => StateEncoder::rules_and(p, k).unwrap(),
            None => StateEncoder::rules(p).unwrap(),
        };
        AgentNet::new(enc, ActionSpace::for_profile(p, kind).unwrap(), seed).unwrap()
    }

    #[test]
    fn single_agent_state_and_grid() {
        let p = Profile::s1();
        let mut a = agent(&p, LoadKind::Threads, Some(LoadKind::Calls), 0);
        assert_eq!(a.state_dim(), 8);
        assert_eq!(a.space.values, [1, 2, 3, 4, 5]);
        let env = Flat(Outcome { qps: 10.0, p503: 0.5 });
        let (mut s, mut b) = rngs();
        let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: 0x100, reward_scale: 1.0 };
        let out = run_round_single(&mut a, Service { profile: &p, env: &env }, &mut ctx).unwrap();
        let step = out.record.steps[0];
        assert!(p.contains(&step.agent) && p.contains(&step.baseline));
        assert_eq!(step.agent[..7], step.baseline[..7]);
        assert_eq!(step.agent[8], step.baseline[8]);
        assert_eq!((step.agent_key(), step.baseline_key()), (0x100, 0x101));
        assert_eq!((out.rl_reward, out.baseline_reward), (5.0, 5.0));
    }

    #[test]
    fn greedy_agent_on_flat_environment_is_stationary() {
        let p = Profile::s2();
        let mut a = agent(&p, LoadKind::Calls, Some(LoadKind::Threads), 4);
        a.net.layers[2].weights.fill(0.0);
        a.net.layers[2].bias = ndarray::array![0.0, 0.0, 1.0, 0.0];
        // reward 1 equals the chosen value, so the targets never move the net
        let env = Flat(Outcome { qps: 2.0, p503: 0.5 });
        let (mut s, mut b) = rngs();
        for t in 0..30u64 {
            let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: t << 8, reward_scale: 1.0 };
            let out = run_round_single(&mut a, Service { profile: &p, env: &env }, &mut ctx).unwrap();
            assert_eq!(out.record.steps[0].agent[8], 300.0);
        }
    }

    #[test]
    fn multi_modes_have_expected_dims_and_share_reward() {
        let p = Profile::s2();
        let env = CallsReward;
        for (mode, ts, cs) in [
            (MultiMode::Independent, None, None),
            (MultiMode::ThreadCall, None, Some(LoadKind::Threads)),
            (MultiMode::CallThread, Some(LoadKind::Calls), None),
        ] {
            let mut t = agent(&p, LoadKind::Threads, ts, 1);
            let mut c = agent(&p, LoadKind::Calls, cs, 2);
            let dims = (t.state_dim(), c.state_dim());
            match mode {
                MultiMode::Independent => assert_eq!(dims, (7, 7)),
                _ => assert_eq!(dims.0.min(dims.1), 7),
            }
            let (mut s, mut b) = rngs();
            let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: 0, reward_scale: 100.0 };
            let out = run_round_multi(&mut t, &mut c, mode, Service { profile: &p, env: &env }, &mut ctx).unwrap();
            let x = out.record.steps[0].agent;
            assert!(p.contains(&x));
            assert_eq!(out.rl_reward, x[8] * 0.5);
            // wrong dims for this mode are refused
            let mut wrong = agent(&p, LoadKind::Calls, Some(LoadKind::Threads), 2);
            if mode != MultiMode::ThreadCall {
                let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: 0, reward_scale: 1.0 };
                assert!(run_round_multi(&mut t, &mut wrong, mode, Service { profile: &p, env: &env }, &mut ctx).is_err());
            }
        }
    }

    #[test]
    fn multi_agents_receive_identical_targets() {
        let p = Profile::s2();
        let env = CallsReward;
        let mut t = agent(&p, LoadKind::Threads, None, 1);
        let mut c = agent(&p, LoadKind::Calls, None, 2);
        t.rule = crate::agents::UpdateRule::Reinforce;
        c.rule = crate::agents::UpdateRule::Reinforce;
        t.horizon = 10;
        c.horizon = 10;
        let (mut s, mut b) = rngs();
        for k in 0..5u64 {
            let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: k << 8, reward_scale: 3.0 };
            run_round_multi(&mut t, &mut c, MultiMode::Independent, Service { profile: &p, env: &env }, &mut ctx).unwrap();
        }
        let tr: Vec<f64> = t.trajectory.iter().map(|s| s.reward).collect();
        let cr: Vec<f64> = c.trajectory.iter().map(|s| s.reward).collect();
        assert_eq!(tr.len(), 5);
        assert_eq!(tr, cr);
    }

    #[test]
    fn collab_round_rewards_and_layout() {
        let p = Profile::s2();
        let envs: Vec<MeshEnvironment> = (0..3)
            .map(|i| MeshEnvironment { backend: BackendConfig::default(), seed: i })
            .collect();
        let services: Vec<Service> = envs.iter().map(|e| Service { profile: &p, env: e }).collect();
        let enc = StateEncoder::rules_and(&p, LoadKind::Threads).unwrap();
        let space = ActionSpace::for_profile(&p, LoadKind::Calls).unwrap();
        let mut groups = vec![CollabNets::new(vec![enc; 3], vec![space; 3], 0, false).unwrap()];
        let (mut s, mut b) = rngs();
        let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: 7 << 8, reward_scale: 10.0 };
        let out = run_round_collab(&mut groups, &services, 0.5, &mut ctx).unwrap();
        assert_eq!(out.record.steps.len(), 3);
        let mut replay = Vec::new();
        for (n, step) in out.record.steps.iter().enumerate() {
            assert_eq!(step.key, 7 << 8 | (n as u64) << 1);
            replay.push(envs[n].respond(&[step.agent], &[step.agent_key()]).unwrap()[0]);
        }
        assert_eq!(out.rl_reward, round_reward(&replay, Some(0.5)).unwrap());
        let plain: f64 = replay.iter().map(Outcome::reward).sum();
        assert!((out.rl_reward - 1.5 * plain).abs() < 1e-9 * plain.max(1.0));
    }

    #[test]
    fn collab_both_uses_two_groups() {
        let p = Profile::s3();
        let env = CallsReward;
        let services = vec![Service { profile: &p, env: &env }; 2];
        let enc = StateEncoder::rules(&p).unwrap();
        let t = ActionSpace::for_profile(&p, LoadKind::Threads).unwrap();
        let c = ActionSpace::for_profile(&p, LoadKind::Calls).unwrap();
        let mut groups = vec![
            CollabNets::new(vec![enc.clone(); 2], vec![t; 2], 0, false).unwrap(),
            CollabNets::new(vec![enc; 2], vec![c; 2], 1, false).unwrap(),
        ];
        let (mut s, mut b) = rngs();
        let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: 0, reward_scale: 1.0 };
        let out = run_round_collab(&mut groups, &services, 0.0, &mut ctx).unwrap();
        for step in &out.record.steps {
            assert!(p.contains(&step.agent) && p.contains(&step.baseline));
        }
        groups.swap(0, 1);
        let mut ctx = RoundContext { state_rng: &mut s, baseline_rng: &mut b, key: 0, reward_scale: 1.0 };
        assert!(run_round_collab(&mut groups, &services, 0.0, &mut ctx).is_err());
    }

    #[test]
    fn round_reward_reductions() {
        let o = [Outcome { qps: 10.0, p503: 0.5 }, Outcome { qps: 20.0, p503: 0.25 }];
        assert_eq!(round_reward(&o, None).unwrap(), 10.0);
        assert_eq!(round_reward(&o, Some(0.0)).unwrap(), 10.0);
        assert_eq!(round_reward(&o[..1], Some(0.0)).unwrap(), 5.0);
        assert_eq!(round_reward(&o, Some(1.0)).unwrap(), 20.0);
    }
}
