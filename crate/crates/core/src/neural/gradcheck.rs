use ndarray::ArrayView2;

use super::{mse, DenseNet, Gradients};
use crate::error::{Error, Result};

/// Parameter budget above which the oracle refuses to run.
pub const MAX_GRAD_CHECK_PARAMS: usize = 10_000;

const STEP: f64 = 1e-5;

fn loss_at(net: &DenseNet, x: &[f64], target: &[f64]) -> Result<f64> {
    Ok(mse(&net.predict(x)?, target)?.0)
}

/// Max relative error between `analytic` and central differences of the
/// MSE loss at `(x, target)`; relative error is `|a-n| / max(|a|, |n|, 1e-8)`.
pub fn compare_with_finite_differences(
    net: &DenseNet,
    x: &[f64],
    target: &[f64],
    analytic: &Gradients,
) -> Result<f64> {
    if net.num_params() > MAX_GRAD_CHECK_PARAMS {
        return Err(Error::validation(
            "net",
            format!(
                "{} parameters exceed the finite-difference budget of {MAX_GRAD_CHECK_PARAMS}",
                net.num_params()
            ),
        ));
    }
    let analytic = analytic.flatten();
    if analytic.len() != net.num_params() {
        return Err(Error::validation("gradients", "shape does not match the network"));
    }
    let mut probe = net.clone();
    let mut worst = 0.0f64;
    for (k, &a) in analytic.iter().enumerate() {
        let original = *probe.params_mut().nth(k).unwrap();
        *probe.params_mut().nth(k).unwrap() = original + STEP;
        let up = loss_at(&probe, x, target)?;
        *probe.params_mut().nth(k).unwrap() = original - STEP;
        let down = loss_at(&probe, x, target)?;
        *probe.params_mut().nth(k).unwrap() = original;
        let numeric = (up - down) / (2.0 * STEP);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Checks the network's own backward pass against finite differences.
pub fn grad_check(net: &DenseNet, x: &[f64], target: &[f64]) -> Result<f64> {
    let (out, cache) = net.forward(x)?;
    let (_, d_out) = mse(&out, target)?;
    let d_out = ArrayView2::from_shape((1, d_out.len()), &d_out)
        .map_err(|e| Error::validation("target", e.to_string()))?;
    let grads = net.backward(&cache, d_out)?;
    compare_with_finite_differences(net, x, target, &grads)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{Activation, Layer};
    use ndarray::{array, Array2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_case(dims: &[usize], seed: u64) -> (DenseNet, Vec<f64>, Vec<f64>) {
        let mut net = DenseNet::new(dims, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
        for layer in &mut net.layers {
            // non-zero biases keep units away from the rectifier kink
            layer.bias.mapv_inplace(|_| rng.random_range(-0.1..0.1));
        }
        let x = (0..dims[0]).map(|_| rng.random_range(-1.0..1.0)).collect();
        let t = (0..*dims.last().unwrap()).map(|_| rng.random_range(-1.0..1.0)).collect();
        (net, x, t)
    }

    #[test]
    fn exact_for_linear_single_parameter() {
        let net = DenseNet::from_layers(
            vec![Layer { weights: array![[0.7]], bias: array![0.0] }],
            Activation::Identity,
        )
        .unwrap();
        assert!(grad_check(&net, &[1.3], &[0.2]).unwrap() < 1e-9);
    }

    #[test]
    fn random_small_nets_pass() {
        for seed in 0..20 {
            let (net, x, t) = random_case(&[4, 8, 8, 2], seed);
            let err = grad_check(&net, &x, &t).unwrap();
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }

    #[test]
    fn detects_doubled_gradient() {
        let (net, x, t) = random_case(&[4, 8, 8, 2], 3);
        let (out, cache) = net.forward(&x).unwrap();
        let (_, d) = mse(&out, &t).unwrap();
        let mut g = net
            .backward(&cache, Array2::from_shape_vec((1, 2), d).unwrap().view())
            .unwrap();
        g.scale(2.0);
        let err = compare_with_finite_differences(&net, &x, &t, &g).unwrap();
        assert!((err - 0.5).abs() < 1e-4, "{err}");
    }

    #[test]
    fn refuses_large_nets() {
        let net = DenseNet::new(&[9, 512, 512, 2], 0).unwrap();
        assert!(grad_check(&net, &[0.0; 9], &[0.0, 0.0]).is_err());
    }
}
