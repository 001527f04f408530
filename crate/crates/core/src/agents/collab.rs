use ndarray::{s, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{select_action, ActionSpace, StateEncoder, HIDDEN_WIDTH};
use crate::error::{Error, Result};
use crate::neural::{adam_step, mse_batch, Activation, AdamState, DenseNet};

pub const COLLAB_LEARNING_RATE: f64 = 1e-5;

/// One transition for the auxiliary next-state loss.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxSample {
    pub state: Vec<f64>,
    pub next_state: Vec<f64>,
}

#[derive(Debug, Clone)]
struct AuxHead {
    net: DenseNet,
    adam: AdamState,
}

/// Agents of several services sharing one front block.
///
/// Every service routes its state through the single `snet`
/// (`[state_dim, 512]`, rectified output) and then through its own
/// `pnets[n]` (`[512, 512, |A_n|]`).
#[derive(Debug, Clone)]
pub struct CollabNets {
    pub snet: DenseNet,
    pub pnets: Vec<DenseNet>,
    pub spaces: Vec<ActionSpace>,
    pub encoders: Vec<StateEncoder>,
    pub epsilon: f64,
    pub rng: ChaCha8Rng,
    snet_adam: AdamState,
    pnet_adams: Vec<AdamState>,
    aux: Option<AuxHead>,
    previous_states: Option<Vec<Vec<f64>>>,
}

impl CollabNets {
    pub fn new(
        encoders: Vec<StateEncoder>,
        spaces: Vec<ActionSpace>,
        seed: u64,
        snet_aux: bool,
    ) -> Result<Self> {
        Self::with_learning_rate(encoders, spaces, seed, snet_aux, COLLAB_LEARNING_RATE)
    }

    pub fn with_learning_rate(
        encoders: Vec<StateEncoder>,
        spaces: Vec<ActionSpace>,
        seed: u64,
        snet_aux: bool,
        learning_rate: f64,
    ) -> Result<Self> {
        if encoders.is_empty() || encoders.len() != spaces.len() {
            return Err(Error::validation(
                "services",
                format!("{} state encoders for {} action spaces", encoders.len(), spaces.len()),
            ));
        }
        let dim = encoders[0].dim();
        if encoders.iter().any(|e| e.dim() != dim) {
            return Err(Error::validation("encoders", "all services must share one state size"));
        }
        if spaces.iter().any(|s| s.kind != spaces[0].kind) {
            return Err(Error::validation("spaces", "only agents of one kind can share a block"));
        }
        let snet = DenseNet::with_output_activation(&[dim, HIDDEN_WIDTH], Activation::Relu, seed)?;
        let snet_adam = AdamState::new(&snet, learning_rate)?;
        let mut pnets = Vec::with_capacity(spaces.len());
        let mut pnet_adams = Vec::with_capacity(spaces.len());
        for (n, space) in spaces.iter().enumerate() {
            let net = DenseNet::new(
                &[HIDDEN_WIDTH, HIDDEN_WIDTH, space.len()],
                seed.wrapping_add(1 + n as u64),
            )?;
            pnet_adams.push(AdamState::new(&net, learning_rate)?);
            pnets.push(net);
        }
        let aux = if snet_aux {
            let net = DenseNet::new(&[dim + HIDDEN_WIDTH, dim], seed ^ 0xa0a0)?;
            let adam = AdamState::new(&net, learning_rate)?;
            Some(AuxHead { net, adam })
        } else {
            None
        };
        Ok(CollabNets {
            snet,
            pnets,
            spaces,
            encoders,
            epsilon: 0.0,
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0xc011ab),
            snet_adam,
            pnet_adams,
            aux,
            previous_states: None,
        })
    }

    pub fn services(&self) -> usize {
        self.pnets.len()
    }

    pub fn state_dim(&self) -> usize {
        self.snet.input_dim()
    }

    pub fn has_aux(&self) -> bool {
        self.aux.is_some()
    }

    /// The shared block as seen by service `n`.
    pub fn snet_for(&self, n: usize) -> Result<&DenseNet> {
        if n >= self.services() {
            return Err(Error::validation("service", format!("index {n} out of range")));
        }
        Ok(&self.snet)
    }

    fn encode_all(&self, states: &[Vec<f64>]) -> Result<Array2<f64>> {
        if states.len() != self.services() {
            return Err(Error::validation(
                "states",
                format!("{} states for {} services", states.len(), self.services()),
            ));
        }
        let mut x = Array2::zeros((states.len(), self.state_dim()));
        for (n, (state, enc)) in states.iter().zip(&self.encoders).enumerate() {
            for (j, v) in enc.encode(state)?.into_iter().enumerate() {
                x[[n, j]] = v;
            }
        }
        Ok(x)
    }

    /// Action values of every service, one state per service.
    pub fn q_values(&self, states: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let ms = self.snet.predict_batch(self.encode_all(states)?.view())?;
        self.pnets
            .iter()
            .enumerate()
            .map(|(n, p)| Ok(p.predict_batch(ms.slice(s![n..n + 1, ..]))?.row(0).to_vec()))
            .collect()
    }

    /// Epsilon-greedy picks for every service, drawn in service order.
    pub fn act(&mut self, states: &[Vec<f64>]) -> Result<Vec<usize>> {
        let q = self.q_values(states)?;
        Ok(q.iter().map(|qn| select_action(qn, self.epsilon, &mut self.rng)).collect())
    }

    /// One round of Q-regression. Each private block takes one Adam step on
    /// its own loss; the shared block sums the gradient reaching it from all
    /// services and takes exactly one step. Returns per-service losses.
    pub fn update(&mut self, states: &[Vec<f64>], actions: &[usize], targets: &[f64]) -> Result<Vec<f64>> {
        let n_services = self.services();
        if actions.len() != n_services || targets.len() != n_services {
            return Err(Error::validation(
                "actions",
                format!("expected {n_services} actions and targets"),
            ));
        }
        let x = self.encode_all(states)?;
        let (ms, snet_cache) = self.snet.forward_batch(x.view())?;
        let mut d_ms = Array2::zeros(ms.dim());
        let mut losses = Vec::with_capacity(n_services);
        for n in 0..n_services {
            let (action, target) = (actions[n], targets[n]);
            if action >= self.spaces[n].len() {
                return Err(Error::validation("action", format!("index {action} out of range")));
            }
            if !target.is_finite() {
                return Err(Error::numeric("q-regression", format!("non-finite target {target}")));
            }
            let pnet = &mut self.pnets[n];
            let (q, cache) = pnet.forward_batch(ms.slice(s![n..n + 1, ..]))?;
            let diff = q[[0, action]] - target;
            let loss = diff * diff;
            if !loss.is_finite() {
                return Err(Error::numeric("q-regression", format!("non-finite loss {loss}")));
            }
            let mut d = Array2::zeros(q.dim());
            d[[0, action]] = 2.0 * diff;
            let (grads, d_in) = pnet.backward_with_input(&cache, d.view())?;
            adam_step(pnet, &grads, &mut self.pnet_adams[n])?;
            d_ms.row_mut(n).assign(&d_in.row(0));
            losses.push(loss);
        }
        let grads = self.snet.backward(&snet_cache, d_ms.view())?;
        adam_step(&mut self.snet, &grads, &mut self.snet_adam)?;
        Ok(losses)
    }

    /// Auxiliary next-state regression through the shared block: a linear
    /// head maps `(state, SNet(state))` to the next state. One Adam step on
    /// the head and the shared block. Returns `None` when the head is off.
    pub fn snet_aux_update(&mut self, buffer: &[AuxSample]) -> Result<Option<f64>> {
        let Some(aux) = self.aux.as_mut() else {
            return Ok(None);
        };
        if buffer.is_empty() {
            return Err(Error::validation("buffer", "auxiliary update needs at least one sample"));
        }
        let dim = self.snet.input_dim();
        let enc = &self.encoders[0];
        let mut x = Array2::zeros((buffer.len(), dim));
        let mut y = Array2::zeros((buffer.len(), dim));
        for (i, sample) in buffer.iter().enumerate() {
            for (j, v) in enc.encode(&sample.state)?.into_iter().enumerate() {
                x[[i, j]] = v;
            }
            for (j, v) in enc.encode(&sample.next_state)?.into_iter().enumerate() {
                y[[i, j]] = v;
            }
        }
        let (ms, snet_cache) = self.snet.forward_batch(x.view())?;
        let mut z = Array2::zeros((buffer.len(), dim + HIDDEN_WIDTH));
        z.slice_mut(s![.., ..dim]).assign(&x);
        z.slice_mut(s![.., dim..]).assign(&ms);
        let (pred, head_cache) = aux.net.forward_batch(z.view())?;
        let (loss, d_pred) = mse_batch(pred.view(), y.view())?;
        if !loss.is_finite() {
            return Err(Error::numeric("snet-aux", format!("non-finite loss {loss}")));
        }
        let (head_grads, d_z) = aux.net.backward_with_input(&head_cache, d_pred.view())?;
        adam_step(&mut aux.net, &head_grads, &mut aux.adam)?;
        let d_ms = d_z.slice(s![.., dim..]);
        let snet_grads = self.snet.backward(&snet_cache, d_ms)?;
        adam_step(&mut self.snet, &snet_grads, &mut self.snet_adam)?;
        Ok(Some(loss))
    }

    /// Feeds the transition from the previous round's states to `states`
    /// into the auxiliary loss, when the head is on.
    pub(crate) fn observe_states(&mut self, states: &[Vec<f64>]) -> Result<Option<f64>> {
        if self.aux.is_none() {
            return Ok(None);
        }
        let result = match self.previous_states.take() {
            Some(prev) => {
                let buffer: Vec<AuxSample> = prev
                    .into_iter()
                    .zip(states)
                    .map(|(state, next)| AuxSample {
                        state,
                        next_state: next.clone(),
                    })
                    .collect();
                self.snet_aux_update(&buffer)?
            }
            None => None,
        };
        self.previous_states = Some(states.to_vec());
        Ok(result)
    }
}
