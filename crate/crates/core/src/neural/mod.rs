//! Dense feed-forward networks with hand-written reverse mode, MSE loss,
//! Adam, and a finite-difference gradient oracle.

mod adam;
mod gradcheck;
mod io;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use gradcheck::{compare_with_finite_differences, grad_check, MAX_GRAD_CHECK_PARAMS};
pub use io::{load_weights, save_weights, WeightFile, WEIGHT_FORMAT};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SMALL_BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        if self == Activation::Relu {
            z.mapv_inplace(|v| v.max(0.0));
        }
    }
}

/// One affine map: `weights` is `(out x in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    fn zeros(out: usize, inp: usize) -> Self {
        Layer {
            weights: Array2::zeros((out, inp)),
            bias: Array1::zeros(out),
        }
    }

    fn zeros_like(&self) -> Self {
        Layer::zeros(self.weights.nrows(), self.weights.ncols())
    }

    fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// `x W^T + b` for a batch of rows. Small batches go row by row through
    /// matrix-vector products, which avoid packing the weights.
    fn affine(&self, x: ArrayView2<f64>) -> Array2<f64> {
        if x.nrows() <= SMALL_BATCH {
            let mut z = Array2::zeros((x.nrows(), self.weights.nrows()));
            for (mut out, row) in z.rows_mut().into_iter().zip(x.rows()) {
                out.assign(&(self.weights.dot(&row) + &self.bias));
            }
            z
        } else {
            x.dot(&self.weights.t()) + &self.bias
        }
    }
}

/// Parameter-shaped gradient (or moment) buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<Layer>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Gradients {
            layers: net.layers.iter().map(Layer::zeros_like).collect(),
        }
    }

    /// Element-wise `self += other`.
    pub fn accumulate(&mut self, other: &Gradients) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights += &b.weights;
            a.bias += &b.bias;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for l in &mut self.layers {
            l.weights *= factor;
            l.bias *= factor;
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }
}

/// Multi-layer perceptron: rectifier on hidden layers, `output_activation`
/// (identity unless stated otherwise) on the last layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    pub layers: Vec<Layer>,
    pub output_activation: Activation,
}

/// Activations recorded by a forward pass: the input followed by every
/// layer's post-activation output.
#[derive(Debug, Clone)]
pub struct Cache {
    activations: Vec<Array2<f64>>,
}

impl Cache {
    pub fn output(&self) -> &Array2<f64> {
        self.activations.last().expect("cache holds at least the input")
    }
}

impl DenseNet {
    /// Uniform `+-1/sqrt(fan_in)` weights, zero biases.
    pub fn new(layer_dims: &[usize], seed: u64) -> Result<Self> {
        Self::with_output_activation(layer_dims, Activation::Identity, seed)
    }

    pub fn with_output_activation(
        layer_dims: &[usize],
        output_activation: Activation,
        seed: u64,
    ) -> Result<Self> {
        validate_dims(layer_dims)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = layer_dims
            .windows(2)
            .map(|w| {
                let (inp, out) = (w[0], w[1]);
                let bound = 1.0 / (inp as f64).sqrt();
                let weights =
                    Array2::from_shape_simple_fn((out, inp), || rng.random_range(-bound..=bound));
                Layer {
                    weights,
                    bias: Array1::zeros(out),
                }
            })
            .collect();
        Ok(DenseNet {
            layers,
            output_activation,
        })
    }

    pub fn from_layers(layers: Vec<Layer>, output_activation: Activation) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::validation("layers", "need at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.weights.nrows() {
                return Err(Error::validation(
                    format!("layer {i} bias"),
                    format!("length {} != {} rows", l.bias.len(), l.weights.nrows()),
                ));
            }
            if i > 0 && l.weights.ncols() != layers[i - 1].weights.nrows() {
                return Err(Error::validation(
                    format!("layer {i} weights"),
                    "column count does not match previous layer width",
                ));
            }
        }
        Ok(DenseNet {
            layers,
            output_activation,
        })
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim())
            .chain(self.layers.iter().map(|l| l.weights.nrows()))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().weights.nrows()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Layer::num_params).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }

    fn activation_of(&self, layer: usize) -> Activation {
        if layer + 1 == self.layers.len() {
            self.output_activation
        } else {
            Activation::Relu
        }
    }

    /// Forward pass over a batch (one row per sample).
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, Cache)> {
        if x.ncols() != self.input_dim() {
            return Err(Error::validation(
                "input",
                format!("expected {} features, got {}", self.input_dim(), x.ncols()),
            ));
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_owned());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.affine(activations.last().unwrap().view());
            self.activation_of(i).apply(&mut z);
            activations.push(z);
        }
        let out = activations.last().unwrap().clone();
        Ok((out, Cache { activations }))
    }

    /// Output only, without keeping a cache.
    pub fn predict_batch(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::validation(
                "input",
                format!("expected {} features, got {}", self.input_dim(), x.ncols()),
            ));
        }
        let mut a = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.affine(a.view());
            self.activation_of(i).apply(&mut z);
            a = z;
        }
        Ok(a)
    }

    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, Cache)> {
        let view = ArrayView2::from_shape((1, x.len()), x)
            .map_err(|e| Error::validation("input", e.to_string()))?;
        let (out, cache) = self.forward_batch(view)?;
        Ok((out.into_raw_vec_and_offset().0, cache))
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        let view = ArrayView2::from_shape((1, x.len()), x)
            .map_err(|e| Error::validation("input", e.to_string()))?;
        Ok(self.predict_batch(view)?.into_raw_vec_and_offset().0)
    }

    /// Reverse pass for the loss whose gradient with respect to the output
    /// is `d_out`. Returns parameter gradients and the gradient with respect
    /// to the input batch.
    pub fn backward_with_input(
        &self,
        cache: &Cache,
        d_out: ArrayView2<f64>,
    ) -> Result<(Gradients, Array2<f64>)> {
        let out = cache.output();
        if d_out.dim() != out.dim() || cache.activations.len() != self.layers.len() + 1 {
            return Err(Error::validation(
                "d_out",
                format!("shape {:?} does not match cached output {:?}", d_out.dim(), out.dim()),
            ));
        }
        let mut delta = d_out.to_owned();
        if self.output_activation == Activation::Relu {
            relu_mask(&mut delta, out);
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input = &cache.activations[i];
            let (weights, mut d_input) = if delta.nrows() == 1 {
                single_row_backward(delta.row(0), input.row(0), &layer.weights)
            } else {
                (delta.t().dot(input), delta.dot(&layer.weights))
            };
            let bias = delta.sum_axis(Axis(0));
            if i > 0 {
                relu_mask(&mut d_input, input);
            }
            grads.push(Layer { weights, bias });
            delta = d_input;
        }
        grads.reverse();
        Ok((Gradients { layers: grads }, delta))
    }

    pub fn backward(&self, cache: &Cache, d_out: ArrayView2<f64>) -> Result<Gradients> {
        self.backward_with_input(cache, d_out).map(|(g, _)| g)
    }

    /// Visits every parameter in layer order (weights row-major, then bias).
    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
            .collect()
    }
}

/// Zeroes gradient entries where the rectifier output was not positive.
/// Weight gradient and input gradient of one layer for a single sample,
/// computed row by row; a matrix product would repack the weights on every
/// call.
fn single_row_backward(
    delta: ArrayView1<f64>,
    input: ArrayView1<f64>,
    weights: &Array2<f64>,
) -> (Array2<f64>, Array2<f64>) {
    let mut grad = Array2::zeros(weights.dim());
    let mut d_input = Array1::zeros(weights.ncols());
    for ((mut g, w), &d) in grad.rows_mut().into_iter().zip(weights.rows()).zip(delta) {
        if d != 0.0 {
            g.scaled_add(d, &input);
            d_input.scaled_add(d, &w);
        }
    }
    (grad, d_input.insert_axis(Axis(0)))
}

fn relu_mask(grad: &mut Array2<f64>, activated: &Array2<f64>) {
    Zip::from(grad).and(activated).for_each(|g, &a| {
        if a <= 0.0 {
            *g = 0.0;
        }
    });
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 {
        return Err(Error::validation("layer_dims", "need at least input and output sizes"));
    }
    if let Some(pos) = dims.iter().position(|&d| d == 0) {
        return Err(Error::validation("layer_dims", format!("dimension {pos} is zero")));
    }
    Ok(())
}

/// Mean squared error and its gradient `2 (pred - target) / n`.
pub fn mse(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
    if pred.len() != target.len() || pred.is_empty() {
        return Err(Error::validation(
            "target",
            format!("length {} does not match prediction length {}", target.len(), pred.len()),
        ));
    }
    let n = pred.len() as f64;
    let loss = pred.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / n;
    let grad = pred.iter().zip(target).map(|(p, t)| 2.0 * (p - t) / n).collect();
    Ok((loss, grad))
}

/// Batch form of [`mse`], averaging over every element.
pub fn mse_batch(pred: ArrayView2<f64>, target: ArrayView2<f64>) -> Result<(f64, Array2<f64>)> {
    if pred.dim() != target.dim() || pred.is_empty() {
        return Err(Error::validation(
            "target",
            format!("shape {:?} does not match prediction {:?}", target.dim(), pred.dim()),
        ));
    }
    let n = pred.len() as f64;
    let diff = &pred - &target;
    let loss = diff.iter().map(|d| d * d).sum::<f64>() / n;
    Ok((loss, diff * (2.0 / n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn single_unit() -> DenseNet {
        // 1 -> 1 (relu) -> 1, all weights 1, biases 0
        DenseNet::from_layers(
            vec![
                Layer { weights: array![[1.0]], bias: array![0.0] },
                Layer { weights: array![[1.0]], bias: array![0.0] },
            ],
            Activation::Identity,
        )
        .unwrap()
    }

    #[test]
    fn init_shapes_and_determinism() {
        let net = DenseNet::new(&[9, 512, 512, 512, 2], 1).unwrap();
        let shapes: Vec<_> = net.layers.iter().map(|l| l.weights.dim()).collect();
        assert_eq!(shapes, vec![(512, 9), (512, 512), (512, 512), (2, 512)]);
        assert_eq!(net.layer_dims(), vec![9, 512, 512, 512, 2]);
        let agent = DenseNet::new(&[8, 512, 512, 4], 1).unwrap();
        assert_eq!(agent.output_dim(), 4);
        assert_eq!(DenseNet::new(&[3, 5, 2], 7).unwrap(), DenseNet::new(&[3, 5, 2], 7).unwrap());
        assert_ne!(DenseNet::new(&[3, 5, 2], 7).unwrap(), DenseNet::new(&[3, 5, 2], 8).unwrap());
        let bound = 1.0 / 3f64.sqrt();
        let small = DenseNet::new(&[3, 5, 2], 7).unwrap();
        assert!(small.layers[0].weights.iter().all(|w| w.abs() <= bound));
        assert!(small.layers.iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
        assert!(DenseNet::new(&[3], 0).is_err());
        assert!(DenseNet::new(&[3, 0, 2], 0).is_err());
    }

    #[test]
    fn zero_weights_output_bias() {
        let mut net = DenseNet::new(&[3, 4, 2], 0).unwrap();
        for p in net.params_mut() {
            *p = 0.0;
        }
        net.layers[1].bias = array![0.7, -1.5];
        for x in [[0.0, 0.0, 0.0], [5.0, -2.0, 9.0]] {
            assert_eq!(net.predict(&x).unwrap(), vec![0.7, -1.5]);
        }
    }

    #[test]
    fn rectifier_definition() {
        let net = single_unit();
        assert_eq!(net.predict(&[-3.0]).unwrap(), vec![0.0]);
        assert_eq!(net.predict(&[2.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn hand_computed_two_by_two() {
        // W1 = [[1, 2], [-3, 1]], b1 = [0.5, 0]; W2 = [[2, -1], [0.5, 1]], b2 = [0, 1]
        // x = (1, 1): z1 = (3.5, -2) -> relu (3.5, 0) -> out = (7, 2.75)
        let net = DenseNet::from_layers(
            vec![
                Layer { weights: array![[1.0, 2.0], [-3.0, 1.0]], bias: array![0.5, 0.0] },
                Layer { weights: array![[2.0, -1.0], [0.5, 1.0]], bias: array![0.0, 1.0] },
            ],
            Activation::Identity,
        )
        .unwrap();
        assert_eq!(net.predict(&[1.0, 1.0]).unwrap(), vec![7.0, 2.75]);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let net = DenseNet::new(&[3, 4, 2], 0).unwrap();
        assert!(net.forward(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let net = DenseNet::new(&[4, 8, 3], 2).unwrap();
        let (_, cache) = net.forward(&[0.1, -0.4, 0.9, 1.2]).unwrap();
        let g = net.backward(&cache, Array2::zeros((1, 3)).view()).unwrap();
        assert!(g.flatten().iter().all(|&v| v == 0.0));
        assert!(net.backward(&cache, Array2::zeros((1, 2)).view()).is_err());
    }

    #[test]
    fn linear_layer_gradient_is_outer_product() {
        let net = DenseNet::new(&[3, 2], 5).unwrap();
        let x = [0.5, -1.0, 2.0];
        let (_, cache) = net.forward(&x).unwrap();
        let d_out = array![[1.5, -0.25]];
        let g = net.backward(&cache, d_out.view()).unwrap();
        for r in 0..2 {
            for (c, xc) in x.iter().enumerate() {
                assert_eq!(g.layers[0].weights[[r, c]], d_out[[0, r]] * xc);
            }
            assert_eq!(g.layers[0].bias[r], d_out[[0, r]]);
        }
    }

    #[test]
    fn mse_examples() {
        let (loss, grad) = mse(&[0.3, 0.4], &[0.3, 0.4]).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(grad, vec![0.0, 0.0]);
        let (loss, grad) = mse(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(loss, 0.5);
        assert_eq!(grad, vec![1.0, 0.0]);
        assert!(mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mse_matches_straight_line_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.random_range(1..20);
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let t: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let (loss, grad) = mse(&p, &t).unwrap();
            let mut acc = 0.0;
            for i in 0..n {
                let d = p[i] - t[i];
                acc += d * d;
                assert!((grad[i] - 2.0 * d / n as f64).abs() < 1e-12);
            }
            assert!((loss - acc / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn forward_is_pure() {
        let net = DenseNet::new(&[4, 16, 2], 9).unwrap();
        let x = [0.3, 0.1, -0.7, 2.0];
        let a = net.predict(&x).unwrap();
        let b = net.forward(&x).unwrap().0;
        assert_eq!(a, b);
        assert_eq!(a, net.predict(&x).unwrap());
    }

    #[test]
    fn relu_output_masks_gradient() {
        let net = DenseNet::with_output_activation(&[2, 3], Activation::Relu, 4).unwrap();
        let x = [1.0, -1.0];
        let (out, cache) = net.forward(&x).unwrap();
        let g = net.backward(&cache, Array2::ones((1, 3)).view()).unwrap();
        for (r, &o) in out.iter().enumerate() {
            let expected = if o > 0.0 { 1.0 } else { 0.0 };
            assert_eq!(g.layers[0].bias[r], expected);
        }
    }

    #[test]
    fn row_and_batch_paths_agree() {
        let net = DenseNet::new(&[5, 12, 9, 3], 4).unwrap();
        let x = Array2::from_shape_fn((20, 5), |(i, j)| ((i * 5 + j) as f64 * 0.37).sin());
        let d = Array2::from_shape_fn((20, 3), |(i, j)| ((i + 2 * j) as f64 * 0.11).cos());
        let (big, cache) = net.forward_batch(x.view()).unwrap();
        let (g_big, in_big) = net.backward_with_input(&cache, d.view()).unwrap();
        let mut g_sum = Gradients::zeros_like(&net);
        for r in 0..20 {
            let (one, c) = net.forward_batch(x.slice(ndarray::s![r..r + 1, ..])).unwrap();
            for (a, b) in one.row(0).iter().zip(big.row(r)) {
                assert!((a - b).abs() < 1e-12);
            }
            let (g, inp) = net.backward_with_input(&c, d.slice(ndarray::s![r..r + 1, ..])).unwrap();
            for (a, b) in inp.row(0).iter().zip(in_big.row(r)) {
                assert!((a - b).abs() < 1e-12);
            }
            for (acc, l) in g_sum.layers.iter_mut().zip(&g.layers) {
                acc.weights += &l.weights;
                acc.bias += &l.bias;
            }
        }
        for (a, b) in g_sum.layers.iter().zip(&g_big.layers) {
            assert!((&a.weights - &b.weights).iter().all(|v| v.abs() < 1e-10));
            assert!((&a.bias - &b.bias).iter().all(|v| v.abs() < 1e-10));
        }
    }
}
