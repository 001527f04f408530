use ndarray::{Array, Dimension, Zip};
use serde::{Deserialize, Serialize};

use super::{DenseNet, Gradients};
use crate::error::{Error, Result};

/// Adam moment buffers plus hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: Gradients,
    pub second_moment: Gradients,
    pub step: u64,
    pub config: AdamConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamConfig {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamState {
    pub fn new(net: &DenseNet, learning_rate: f64) -> Result<Self> {
        Self::with_config(net, AdamConfig::with_learning_rate(learning_rate))
    }

    pub fn with_config(net: &DenseNet, config: AdamConfig) -> Result<Self> {
        if !(config.learning_rate.is_finite() && config.learning_rate > 0.0) {
            return Err(Error::validation(
                "learning_rate",
                format!("must be finite and > 0, got {}", config.learning_rate),
            ));
        }
        Ok(AdamState {
            first_moment: Gradients::zeros_like(net),
            second_moment: Gradients::zeros_like(net),
            step: 0,
            config,
        })
    }
}

/// One bias-corrected Adam update of `net` in place.
pub fn adam_step(net: &mut DenseNet, grads: &Gradients, state: &mut AdamState) -> Result<()> {
    if grads.layers.len() != net.layers.len() || state.first_moment.layers.len() != net.layers.len() {
        return Err(Error::validation("gradients", "layer count does not match the network"));
    }
    for (i, (g, p)) in grads.layers.iter().zip(&net.layers).enumerate() {
        if g.weights.dim() != p.weights.dim() || g.bias.dim() != p.bias.dim() {
            return Err(Error::validation(
                format!("gradients layer {i}"),
                "shape does not match the network",
            ));
        }
        if !g.weights.iter().chain(g.bias.iter()).all(|v| v.is_finite()) {
            return Err(Error::numeric(format!("layer {i}"), "non-finite gradient"));
        }
    }

    state.step += 1;
    let AdamConfig {
        learning_rate: lr,
        beta1: b1,
        beta2: b2,
        epsilon: eps,
    } = state.config;
    let t = state.step as i32;
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);

    let update = |p: &mut f64, g: &f64, m: &mut f64, v: &mut f64| {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / c1;
        let v_hat = *v / c2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    };

    for (((p, g), m), v) in net
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(&mut state.first_moment.layers)
        .zip(&mut state.second_moment.layers)
    {
        update_all(&mut p.weights, &g.weights, &mut m.weights, &mut v.weights, &update);
        update_all(&mut p.bias, &g.bias, &mut m.bias, &mut v.bias, &update);
    }
    Ok(())
}

/// Applies `f` element-wise, on flat slices when all four arrays are
/// contiguous in the same order (which lets the loop vectorize).
fn update_all<D: Dimension>(
    p: &mut Array<f64, D>,
    g: &Array<f64, D>,
    m: &mut Array<f64, D>,
    v: &mut Array<f64, D>,
    f: &impl Fn(&mut f64, &f64, &mut f64, &mut f64),
) {
    let same_layout = p.strides() == g.strides() && p.strides() == m.strides() && p.strides() == v.strides();
    if same_layout {
        if let (Some(ps), Some(gs), Some(ms), Some(vs)) = (
            p.as_slice_memory_order_mut(),
            g.as_slice_memory_order(),
            m.as_slice_memory_order_mut(),
            v.as_slice_memory_order_mut(),
        ) {
            for (((p, g), m), v) in ps.iter_mut().zip(gs).zip(ms.iter_mut()).zip(vs.iter_mut()) {
                f(p, g, m, v);
            }
            return;
        }
    }
    Zip::from(p).and(g).and(m).and(v).for_each(f);
}
