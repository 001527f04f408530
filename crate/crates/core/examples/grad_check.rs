//! Compares hand-written backpropagation with central finite differences.
//!
//! cargo run --example grad_check

use meshrl::neural::{grad_check, Activation, DenseNet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_net(dims: &[usize], output: Activation, seed: u64) -> meshrl::Result<(DenseNet, Vec<f64>, Vec<f64>)> {
    let mut net = DenseNet::with_output_activation(dims, output, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Zero biases put dead units exactly on the rectifier kink, where a
    // central difference sees half the slope.
    for layer in &mut net.layers {
        layer.bias.mapv_inplace(|_| rng.random_range(-0.1..0.1));
    }
    let x = (0..dims[0]).map(|_| rng.random_range(-1.0..1.0)).collect();
    let t = (0..*dims.last().unwrap()).map(|_| rng.random_range(-1.0..1.0)).collect();
    Ok((net, x, t))
}

fn main() -> meshrl::Result<()> {
    for dims in [&[4, 8, 8, 2][..], &[9, 16, 16, 2]] {
        let mut worst: f64 = 0.0;
        for seed in 0..20 {
            let (net, x, t) = random_net(dims, Activation::Identity, seed)?;
            worst = worst.max(grad_check(&net, &x, &t)?);
        }
        println!("{dims:?}: max relative error over 20 nets {worst:.2e}");
    }

    let (net, x, t) = random_net(&[3, 5, 2], Activation::Relu, 9)?;
    println!("rectified output layer: {:.2e}", grad_check(&net, &x, &t)?);
    Ok(())
}
