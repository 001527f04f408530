use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{select_action, ActionSpace, StateEncoder};
use crate::error::{Error, Result};
use crate::neural::{adam_step, AdamState, DenseNet};

pub const HIDDEN_WIDTH: usize = 512;
pub const AGENT_LEARNING_RATE: f64 = 5e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum UpdateRule {
    /// Squared error between the chosen action's value and the reward.
    #[default]
    #[serde(rename = "qreg")]
    QRegression,
    /// Softmax policy gradient over short trajectories.
    #[serde(rename = "reinforce")]
    Reinforce,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
}

pub type Trajectory = Vec<TrajectoryStep>;

/// `R_t = sum_k alpha^(k-t) r_k` for every step `t`.
pub fn discounted_return(rewards: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for (i, &r) in rewards.iter().enumerate().rev() {
        acc = r + alpha * acc;
        out[i] = acc;
    }
    out
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|&z| (z - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// One agent: a `[state_dim, 512, 512, |A|]` network with one output per
/// grid action.
#[derive(Debug, Clone)]
pub struct AgentNet {
    pub net: DenseNet,
    pub adam: AdamState,
    pub space: ActionSpace,
    pub encoder: StateEncoder,
    pub epsilon: f64,
    pub rng: ChaCha8Rng,
    pub rule: UpdateRule,
    /// Discount applied to trajectory returns under [`UpdateRule::Reinforce`].
    pub alpha: f64,
    /// Steps collected before each policy-gradient update.
    pub horizon: usize,
    pub trajectory: Trajectory,
}

impl AgentNet {
    pub fn new(encoder: StateEncoder, space: ActionSpace, seed: u64) -> Result<Self> {
        Self::with_learning_rate(encoder, space, seed, AGENT_LEARNING_RATE)
    }

    pub fn with_learning_rate(
        encoder: StateEncoder,
        space: ActionSpace,
        seed: u64,
        learning_rate: f64,
    ) -> Result<Self> {
        let net = DenseNet::new(&[encoder.dim(), HIDDEN_WIDTH, HIDDEN_WIDTH, space.len()], seed)?;
        let adam = AdamState::new(&net, learning_rate)?;
        Ok(AgentNet {
            net,
            adam,
            space,
            encoder,
            epsilon: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0xa11ce),
            rule: UpdateRule::QRegression,
            alpha: 1.0,
            horizon: 1,
            trajectory: Vec::new(),
        })
    }

    pub fn state_dim(&self) -> usize {
        self.encoder.dim()
    }

    pub fn q_values(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.net.predict(&self.encoder.encode(state)?)
    }

    /// Picks an action with the agent's rule: epsilon-greedy on the values,
    /// or a draw from the softmax policy.
    pub fn act(&mut self, state: &[f64]) -> Result<usize> {
        let q = self.q_values(state)?;
        Ok(match self.rule {
            UpdateRule::QRegression => select_action(&q, self.epsilon, &mut self.rng),
            UpdateRule::Reinforce => sample_index(&softmax(&q), &mut self.rng),
        })
    }

    /// Applies the agent's rule to one observed reward. Under
    /// [`UpdateRule::Reinforce`] the step is buffered until `horizon` steps
    /// have been seen; `None` means no update was made.
    pub fn learn(&mut self, state: &[f64], action: usize, reward: f64) -> Result<Option<f64>> {
        match self.rule {
            UpdateRule::QRegression => self.update_q_regression(state, action, reward).map(Some),
            UpdateRule::Reinforce => {
                self.trajectory.push(TrajectoryStep {
                    state: state.to_vec(),
                    action,
                    reward,
                });
                if self.trajectory.len() < self.horizon.max(1) {
                    return Ok(None);
                }
                let traj = std::mem::take(&mut self.trajectory);
                self.update_reinforce(&traj, self.alpha).map(Some)
            }
        }
    }

    /// One Adam step on `(Q(state)[action] - target)^2`.
    pub fn update_q_regression(&mut self, state: &[f64], action: usize, target: f64) -> Result<f64> {
        if action >= self.space.len() {
            return Err(Error::validation("action", format!("index {action} out of range")));
        }
        if !target.is_finite() {
            return Err(Error::numeric("q-regression", format!("non-finite target {target}")));
        }
        let (q, cache) = self.net.forward(&self.encoder.encode(state)?)?;
        let diff = q[action] - target;
        let loss = diff * diff;
        if !loss.is_finite() {
            return Err(Error::numeric("q-regression", format!("non-finite loss {loss}")));
        }
        let mut d = Array2::zeros((1, q.len()));
        d[[0, action]] = 2.0 * diff;
        let grads = self.net.backward(&cache, d.view())?;
        adam_step(&mut self.net, &grads, &mut self.adam)?;
        Ok(loss)
    }

    /// One Adam step ascending `mean_t log pi(a_t | s_t) * R_t` with the
    /// outputs read as softmax logits. Returns the negated objective.
    pub fn update_reinforce(&mut self, trajectory: &[TrajectoryStep], alpha: f64) -> Result<f64> {
        if trajectory.is_empty() {
            return Err(Error::validation("trajectory", "cannot update on an empty trajectory"));
        }
        let rewards: Vec<f64> = trajectory.iter().map(|s| s.reward).collect();
        let returns = discounted_return(&rewards, alpha);
        let dim = self.state_dim();
        let mut x = Array2::zeros((trajectory.len(), dim));
        for (i, step) in trajectory.iter().enumerate() {
            if step.action >= self.space.len() {
                return Err(Error::validation("action", format!("index {} out of range", step.action)));
            }
            for (j, v) in self.encoder.encode(&step.state)?.into_iter().enumerate() {
                x[[i, j]] = v;
            }
        }
        let (logits, cache) = self.net.forward_batch(x.view())?;
        let n = trajectory.len() as f64;
        let mut loss = 0.0;
        let mut d = Array2::zeros(logits.dim());
        for (i, step) in trajectory.iter().enumerate() {
            let pi = softmax(&logits.row(i).to_vec());
            loss -= returns[i] * pi[step.action].ln() / n;
            for (k, &p) in pi.iter().enumerate() {
                let onehot = if k == step.action { 1.0 } else { 0.0 };
                d[[i, k]] = -returns[i] * (onehot - p) / n;
            }
        }
        if !loss.is_finite() {
            return Err(Error::numeric("reinforce", format!("non-finite loss {loss}")));
        }
        let grads = self.net.backward(&cache, d.view())?;
        adam_step(&mut self.net, &grads, &mut self.adam)?;
        Ok(loss)
    }
}

fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}
