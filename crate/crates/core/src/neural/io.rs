//! JSON weight files.
//!
//! ```text
//! {
//!   "format": "meshrl-dense-v1",
//!   "layer_dims": [9, 512, 512, 512, 2],
//!   "hidden_activation": "relu",
//!   "output_activation": "identity",
//!   "weights": [ [[row 0], [row 1], ...], ... ],   // one (out x in) matrix per layer, row-major
//!   "biases": [ [...], ... ],
//!   "scaler": { "input_mean": [..9], "input_std": [..9],
//!               "output_mean": [..2], "output_std": [..2] },   // optional
//!   "profile": "S1"                                             // optional
//! }
//! ```
//!
//! Numbers are written in shortest round-trip form, so a save/load cycle
//! reproduces every parameter bit for bit.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{Activation, DenseNet, Layer};
use crate::datagen::ScalerParams;
use crate::error::{Error, Result};

pub const WEIGHT_FORMAT: &str = "meshrl-dense-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFile {
    pub format: String,
    pub layer_dims: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub weights: Vec<Vec<Vec<f64>>>,
    pub biases: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaler: Option<ScalerParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
}

impl WeightFile {
    pub fn from_net(net: &DenseNet, scaler: Option<ScalerParams>, profile: Option<String>) -> Self {
        WeightFile {
            format: WEIGHT_FORMAT.into(),
            layer_dims: net.layer_dims(),
            hidden_activation: Activation::Relu,
            output_activation: net.output_activation,
            weights: net
                .layers
                .iter()
                .map(|l| l.weights.rows().into_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: net.layers.iter().map(|l| l.bias.to_vec()).collect(),
            scaler,
            profile,
        }
    }

    pub fn to_net(&self) -> Result<DenseNet> {
        if self.format != WEIGHT_FORMAT {
            return Err(Error::Format(format!(
                "unsupported weight format {:?}, expected {WEIGHT_FORMAT:?}",
                self.format
            )));
        }
        if self.hidden_activation != Activation::Relu {
            return Err(Error::Format("hidden_activation must be \"relu\"".into()));
        }
        let dims = &self.layer_dims;
        if dims.len() < 2 || self.weights.len() != dims.len() - 1 || self.biases.len() != dims.len() - 1 {
            return Err(Error::Format("layer count does not match layer_dims".into()));
        }
        let mut layers = Vec::with_capacity(dims.len() - 1);
        for (l, (rows, bias)) in self.weights.iter().zip(&self.biases).enumerate() {
            let (inp, out) = (dims[l], dims[l + 1]);
            if rows.len() != out || rows.iter().any(|r| r.len() != inp) || bias.len() != out {
                return Err(Error::Format(format!(
                    "layer {l}: expected {out}x{inp} weights and {out} biases"
                )));
            }
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            let weights = Array2::from_shape_vec((out, inp), flat)
                .map_err(|e| Error::Format(e.to_string()))?;
            layers.push(Layer {
                weights,
                bias: Array1::from(bias.clone()),
            });
        }
        let net = DenseNet::from_layers(layers, self.output_activation)
            .map_err(|e| Error::Format(e.to_string()))?;
        if !net.is_finite() {
            return Err(Error::Format("non-finite parameter".into()));
        }
        Ok(net)
    }
}

pub fn save_weights(file: &WeightFile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string(file).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let net = DenseNet::new(&[5, 7, 3], 12).unwrap();
        let path = dir.path().join("w.json");
        save_weights(&WeightFile::from_net(&net, None, None), &path).unwrap();
        let back = load_weights(&path).unwrap().to_net().unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let net = DenseNet::new(&[2, 3, 1], 1).unwrap();
        let path = dir.path().join("w.json");
        save_weights(&WeightFile::from_net(&net, None, None), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();

        std::fs::write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(load_weights(&path), Err(Error::Format(_))));

        let mut wf = WeightFile::from_net(&net, None, None);
        wf.layer_dims = vec![2, 4, 1];
        assert!(matches!(wf.to_net(), Err(Error::Format(_))));
        let mut wf = WeightFile::from_net(&net, None, None);
        wf.format = "other".into();
        assert!(matches!(wf.to_net(), Err(Error::Format(_))));
    }
}
