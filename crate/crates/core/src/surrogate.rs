//! The learned simulation model: a dense network mapping the 9 canonical
//! inputs (7 rules, threads, calls) to (qps, p503), plus the linear
//! baselines it is compared against.

use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datagen::{
    apply_scaler, fit_scaler, LoadKind, ScalerParams, TraceRecord, NUM_INPUTS, NUM_OUTPUTS,
};
use crate::error::{Error, Result};
use crate::neural::{
    adam_step, load_weights, mse_batch, save_weights, AdamState, DenseNet, WeightFile,
};

/// Hidden widths of the surrogate network.
pub const SURROGATE_DIMS: [usize; 5] = [NUM_INPUTS, 512, 512, 512, NUM_OUTPUTS];

/// Assembles the 9-vector fed to the surrogate from an agent state and the
/// chosen actions.
///
/// `state` holds the 7 rules, optionally followed by one loading value
/// whose kind is `state_load`. `actions` supplies the remaining loading
/// values. Threads always land in slot 8 and calls in slot 9, whichever of
/// them came from the state.
pub fn concat_input(
    state: &[f64],
    state_load: Option<LoadKind>,
    actions: &[(LoadKind, f64)],
) -> Result<[f64; NUM_INPUTS]> {
    let expected_state = 7 + usize::from(state_load.is_some());
    if state.len() != expected_state || state.len() + actions.len() != NUM_INPUTS {
        return Err(Error::validation(
            "input",
            format!(
                "state of {} values plus {} actions does not assemble into {NUM_INPUTS}",
                state.len(),
                actions.len()
            ),
        ));
    }
    let mut out = [f64::NAN; NUM_INPUTS];
    out[..7].copy_from_slice(&state[..7]);
    let loads = state_load
        .map(|k| (k, state[7]))
        .into_iter()
        .chain(actions.iter().copied());
    for (kind, value) in loads {
        let slot = kind.slot();
        if !out[slot].is_nan() {
            return Err(Error::validation("input", format!("{kind:?} supplied twice")));
        }
        out[slot] = value;
    }
    Ok(out)
}

/// Trained surrogate with the scaler fitted on its training split.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateModel {
    pub net: DenseNet,
    pub scaler: ScalerParams,
    pub profile: String,
}

impl SurrogateModel {
    pub fn new(net: DenseNet, scaler: ScalerParams, profile: impl Into<String>) -> Result<Self> {
        if net.input_dim() != NUM_INPUTS || net.output_dim() != NUM_OUTPUTS {
            return Err(Error::validation(
                "net",
                format!(
                    "surrogate must map {NUM_INPUTS} inputs to {NUM_OUTPUTS} outputs, got {:?}",
                    net.layer_dims()
                ),
            ));
        }
        scaler.validate()?;
        Ok(SurrogateModel {
            net,
            scaler,
            profile: profile.into(),
        })
    }

    /// Predicts `[qps, p503]` in raw units; qps is clamped to `>= 0` and
    /// p503 to `[0, 1]`.
    pub fn predict(&self, input: &[f64; NUM_INPUTS]) -> Result<[f64; NUM_OUTPUTS]> {
        Ok(self.predict_many(std::slice::from_ref(input))?[0])
    }

    pub fn predict_many(&self, inputs: &[[f64; NUM_INPUTS]]) -> Result<Vec<[f64; NUM_OUTPUTS]>> {
        let mut x = Array2::zeros((inputs.len(), NUM_INPUTS));
        for (i, input) in inputs.iter().enumerate() {
            if let Some(j) = input.iter().position(|v| !v.is_finite()) {
                return Err(Error::validation(
                    format!("input[{j}]"),
                    format!("non-finite value {}", input[j]),
                ));
            }
            for (j, v) in self.scaler.scale_input(input).into_iter().enumerate() {
                x[[i, j]] = v;
            }
        }
        let out = self.net.predict_batch(x.view())?;
        Ok(out
            .rows()
            .into_iter()
            .map(|row| clamp_output(self.scaler.unscale_output(&[row[0], row[1]])))
            .collect())
    }
}

fn clamp_output(raw: [f64; NUM_OUTPUTS]) -> [f64; NUM_OUTPUTS] {
    [raw[0].max(0.0), raw[1].clamp(0.0, 1.0)]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingHyper {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainingHyper {
    fn default() -> Self {
        TrainingHyper {
            learning_rate: 1e-5,
            epochs: 200,
            batch_size: 64,
            seed: 0,
        }
    }
}

/// Per-epoch standardized MSE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingCurves {
    pub train_mse: Vec<f64>,
    pub test_mse: Vec<f64>,
    /// Epoch whose parameters were kept.
    pub best_epoch: usize,
    pub best_test_mse: f64,
}

/// Mini-batch Adam on standardized MSE. Keeps the parameters from the
/// epoch with the lowest test MSE.
pub fn train_surrogate(
    train: &[TraceRecord],
    test: &[TraceRecord],
    hyper: &TrainingHyper,
    profile: &str,
) -> Result<(SurrogateModel, TrainingCurves)> {
    if train.is_empty() || test.is_empty() {
        return Err(Error::validation("dataset", "train and test splits must be non-empty"));
    }
    if !(hyper.learning_rate.is_finite() && hyper.learning_rate > 0.0 && hyper.learning_rate < 1.0) {
        return Err(Error::validation(
            "learning_rate",
            format!("must lie in (0, 1), got {}", hyper.learning_rate),
        ));
    }
    if hyper.epochs == 0 || hyper.batch_size == 0 {
        return Err(Error::validation("epochs/batch_size", "must be >= 1"));
    }

    let scaler = fit_scaler(train)?;
    let train_set = apply_scaler(&scaler, train);
    let test_set = apply_scaler(&scaler, test);

    let mut net = DenseNet::new(&SURROGATE_DIMS, hyper.seed)?;
    let mut adam = AdamState::new(&net, hyper.learning_rate)?;
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(hyper.seed.wrapping_add(0x5eed));
    let mut order: Vec<usize> = (0..train.len()).collect();

    let mut curves = TrainingCurves {
        train_mse: Vec::with_capacity(hyper.epochs),
        test_mse: Vec::with_capacity(hyper.epochs),
        best_epoch: 0,
        best_test_mse: f64::INFINITY,
    };
    let mut best = net.clone();

    for epoch in 0..hyper.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        for batch in order.chunks(hyper.batch_size) {
            let x = train_set.inputs.select(Axis(0), batch);
            let y = train_set.targets.select(Axis(0), batch);
            let (pred, cache) = net.forward_batch(x.view())?;
            let (loss, d_pred) = mse_batch(pred.view(), y.view())?;
            let grads = net.backward(&cache, d_pred.view())?;
            adam_step(&mut net, &grads, &mut adam)?;
            loss_sum += loss * batch.len() as f64;
        }
        let pred = net.predict_batch(test_set.inputs.view())?;
        let (test_mse, _) = mse_batch(pred.view(), test_set.targets.view())?;
        if !test_mse.is_finite() {
            return Err(Error::Diverged {
                epoch,
                value: test_mse,
            });
        }
        curves.train_mse.push(loss_sum / train.len() as f64);
        curves.test_mse.push(test_mse);
        if test_mse < curves.best_test_mse {
            curves.best_test_mse = test_mse;
            curves.best_epoch = epoch;
            best.clone_from(&net);
        }
    }

    Ok((SurrogateModel::new(best, scaler, profile)?, curves))
}

/// Mean over rows and both outputs of the squared error in standardized
/// output units.
pub fn evaluate_mse<F>(predict: F, test: &[TraceRecord], scaler: &ScalerParams) -> Result<f64>
where
    F: Fn(&[f64; NUM_INPUTS]) -> Result<[f64; NUM_OUTPUTS]>,
{
    if test.is_empty() {
        return Err(Error::validation("test", "cannot evaluate on an empty set"));
    }
    let mut acc = 0.0;
    for rec in test {
        let pred = scaler.scale_output(&predict(&rec.inputs())?);
        let truth = scaler.scale_output(&rec.outputs());
        acc += pred.iter().zip(&truth).map(|(p, t)| (p - t) * (p - t)).sum::<f64>();
    }
    Ok(acc / (test.len() * NUM_OUTPUTS) as f64)
}

/// Linear baseline `y = intercept + coefficients^T x` in raw units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeModel {
    /// One row per input, one column per output.
    pub coefficients: Vec<[f64; NUM_OUTPUTS]>,
    pub intercept: [f64; NUM_OUTPUTS],
    pub lambda: f64,
}

impl RidgeModel {
    pub fn predict(&self, input: &[f64; NUM_INPUTS]) -> [f64; NUM_OUTPUTS] {
        std::array::from_fn(|k| {
            self.intercept[k]
                + self
                    .coefficients
                    .iter()
                    .zip(input)
                    .map(|(c, x)| c[k] * x)
                    .sum::<f64>()
        })
    }
}

/// Closed-form ridge on standardized data: `(X^T X + lambda I) b = X^T Y`.
/// `lambda = 0` is ordinary least squares. Zero-variance inputs are left
/// out of the system and get a zero coefficient.
pub fn ridge_fit(train: &[TraceRecord], lambda: f64) -> Result<RidgeModel> {
    if train.len() < 10 {
        return Err(Error::validation("train", format!("need >= 10 rows, got {}", train.len())));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::validation("lambda", format!("must be finite and >= 0, got {lambda}")));
    }
    let scaler = fit_scaler(train)?;
    let set = apply_scaler(&scaler, train);
    let active: Vec<usize> = (0..NUM_INPUTS)
        .filter(|&j| set.inputs.column(j).iter().any(|&v| v != 0.0))
        .collect();
    let x = set.inputs.select(Axis(1), &active);
    let mut gram = x.t().dot(&x);
    for i in 0..active.len() {
        gram[[i, i]] += lambda;
    }
    let rhs = x.t().dot(&set.targets);
    let beta = solve(gram, rhs, train.len() as f64).map_err(|_| {
        Error::numeric(
            "ridge_fit",
            "normal matrix is singular; use lambda > 0 to regularize",
        )
    })?;

    let mut coefficients = vec![[0.0; NUM_OUTPUTS]; NUM_INPUTS];
    let mut intercept = [0.0; NUM_OUTPUTS];
    for k in 0..NUM_OUTPUTS {
        let sy = scaler.output_std[k];
        intercept[k] = scaler.output_mean[k];
        for (a, &j) in active.iter().enumerate() {
            let c = beta[[a, k]] * sy / scaler.input_std[j];
            coefficients[j][k] = c;
            intercept[k] -= c * scaler.input_mean[j];
        }
    }
    Ok(RidgeModel {
        coefficients,
        intercept,
        lambda,
    })
}

/// Gaussian elimination with partial pivoting; `scale` sets the singularity
/// threshold.
fn solve(mut a: Array2<f64>, mut b: Array2<f64>, scale: f64) -> std::result::Result<Array2<f64>, ()> {
    let n = a.nrows();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[[i, col]].abs().total_cmp(&a[[j, col]].abs()))
            .unwrap();
        if a[[pivot, col]].abs() <= 1e-10 * scale {
            return Err(());
        }
        if pivot != col {
            for c in 0..n {
                a.swap([col, c], [pivot, c]);
            }
            for c in 0..b.ncols() {
                b.swap([col, c], [pivot, c]);
            }
        }
        for row in col + 1..n {
            let f = a[[row, col]] / a[[col, col]];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[[row, c]] -= f * a[[col, c]];
            }
            for c in 0..b.ncols() {
                b[[row, c]] -= f * b[[col, c]];
            }
        }
    }
    let mut x = Array2::zeros(b.dim());
    for row in (0..n).rev() {
        for c in 0..b.ncols() {
            let tail: f64 = (row + 1..n).map(|k| a[[row, k]] * x[[k, c]]).sum();
            x[[row, c]] = (b[[row, c]] - tail) / a[[row, row]];
        }
    }
    Ok(x)
}

pub fn save_model(model: &SurrogateModel, path: impl AsRef<Path>) -> Result<()> {
    let file = WeightFile::from_net(&model.net, Some(model.scaler.clone()), Some(model.profile.clone()));
    save_weights(&file, path)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SurrogateModel> {
    let file = load_weights(path)?;
    let net = file.to_net()?;
    let scaler = file
        .scaler
        .ok_or_else(|| Error::Format("missing `scaler` block".into()))?;
    scaler.validate()?;
    if net.layer_dims().first() != Some(&NUM_INPUTS) || net.output_dim() != NUM_OUTPUTS {
        return Err(Error::Format(format!(
            "surrogate must map {NUM_INPUTS} inputs to {NUM_OUTPUTS} outputs, got {:?}",
            net.layer_dims()
        )));
    }
    Ok(SurrogateModel {
        net,
        scaler,
        profile: file.profile.unwrap_or_default(),
    })
}

/// Fraction of test rows where `predict` had to clamp at least one output.
pub fn clamp_rate(model: &SurrogateModel, test: &[TraceRecord]) -> Result<f64> {
    if test.is_empty() {
        return Ok(0.0);
    }
    let inputs: Vec<_> = test.iter().map(TraceRecord::inputs).collect();
    let mut x = Array2::zeros((inputs.len(), NUM_INPUTS));
    for (i, input) in inputs.iter().enumerate() {
        for (j, v) in model.scaler.scale_input(input).into_iter().enumerate() {
            x[[i, j]] = v;
        }
    }
    let out = model.net.predict_batch(x.view())?;
    let clamped = (0..out.nrows())
        .filter(|&i| {
            let raw = model.scaler.unscale_output(&[out[[i, 0]], out[[i, 1]]]);
            clamp_output(raw) != raw
        })
        .count();
    Ok(clamped as f64 / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate_dataset, Profile};
    use crate::mesh_sim::BackendConfig;
    use ndarray::array;

    fn rules7() -> Vec<f64> {
        vec![1.0, 2.0, 3.0, 180.0, 100.0, 1.0, 1.0]
    }

    #[test]
    fn concat_single_agent_state() {
        let mut state = rules7();
        state.push(420.0);
        let i = concat_input(&state, Some(LoadKind::Calls), &[(LoadKind::Threads, 4.0)]).unwrap();
        assert_eq!(i, [1.0, 2.0, 3.0, 180.0, 100.0, 1.0, 1.0, 4.0, 420.0]);
        let mut state = rules7();
        state.push(4.0);
        let j = concat_input(&state, Some(LoadKind::Threads), &[(LoadKind::Calls, 420.0)]).unwrap();
        assert_eq!(i, j);
    }

    #[test]
    fn concat_independent_and_dependent() {
        let i = concat_input(&rules7(), None, &[(LoadKind::Threads, 4.0), (LoadKind::Calls, 300.0)])
            .unwrap();
        assert_eq!(i[7..], [4.0, 300.0]);
        // call-thread order still places threads before calls
        let i2 = concat_input(&rules7(), None, &[(LoadKind::Calls, 300.0), (LoadKind::Threads, 4.0)])
            .unwrap();
        assert_eq!(i, i2);
        let mut s2 = rules7();
        s2.push(300.0);
        let i3 = concat_input(&s2, Some(LoadKind::Calls), &[(LoadKind::Threads, 4.0)]).unwrap();
        assert_eq!(i, i3);
    }

    #[test]
    fn concat_rejects_bad_lengths_and_duplicates() {
        assert!(concat_input(&rules7(), None, &[(LoadKind::Threads, 4.0)]).is_err());
        assert!(concat_input(&rules7(), None, &[(LoadKind::Threads, 4.0), (LoadKind::Threads, 5.0)]).is_err());
        let mut s = rules7();
        s.push(4.0);
        assert!(concat_input(&s, Some(LoadKind::Threads), &[(LoadKind::Threads, 4.0)]).is_err());
        assert!(concat_input(&s, None, &[(LoadKind::Threads, 4.0)]).is_err());
    }

    fn unit_scaler() -> ScalerParams {
        ScalerParams {
            input_mean: vec![0.0; 9],
            input_std: vec![1.0; 9],
            output_mean: vec![100.0, 0.2],
            output_std: vec![50.0, 0.1],
        }
    }

    #[test]
    fn zero_network_predicts_unscaled_bias() {
        let mut net = DenseNet::new(&SURROGATE_DIMS, 0).unwrap();
        for p in net.params_mut() {
            *p = 0.0;
        }
        net.layers[3].bias = array![0.5, -1.0];
        let model = SurrogateModel::new(net, unit_scaler(), "S1").unwrap();
        for x in [[0.0; 9], [3.0; 9]] {
            let y = model.predict(&x).unwrap();
            assert_eq!(y, [125.0, 0.1]);
        }
        assert!(model.predict(&[f64::NAN; 9]).is_err());
    }

    #[test]
    fn predict_clamps() {
        let mut net = DenseNet::new(&SURROGATE_DIMS, 0).unwrap();
        for p in net.params_mut() {
            *p = 0.0;
        }
        // raw p503 = 0.2 + 0.1 * 11 = 1.3, raw qps = 100 - 50 * 3 < 0
        net.layers[3].bias = array![-3.0, 11.0];
        let model = SurrogateModel::new(net, unit_scaler(), "S1").unwrap();
        assert_eq!(model.predict(&[0.0; 9]).unwrap(), [0.0, 1.0]);
    }

    fn linear_records(n: usize) -> (Vec<TraceRecord>, [f64; 9], [f64; 9]) {
        let mut recs = generate_dataset(&Profile::s3(), n, 4, &BackendConfig::default()).unwrap();
        let c_qps = [0.5, -1.25, 2.0, 0.0, 0.75, 0.0, -0.5, 3.0, 0.01];
        let c_p = [0.001, 0.002, -0.003, 0.0, 0.004, 0.0, 0.0005, -0.002, 0.0001];
        for r in &mut recs {
            let x = r.inputs();
            r.qps = 10.0 + x.iter().zip(&c_qps).map(|(a, b)| a * b).sum::<f64>();
            r.p503 = 0.1 + x.iter().zip(&c_p).map(|(a, b)| a * b).sum::<f64>();
        }
        (recs, c_qps, c_p)
    }

    #[test]
    fn ols_recovers_linear_coefficients() {
        let (recs, c_qps, c_p) = linear_records(200);
        let model = ridge_fit(&recs, 0.0).unwrap();
        for j in 0..9 {
            if j == 3 || j == 5 {
                // constant columns in S3
                assert_eq!(model.coefficients[j], [0.0, 0.0]);
                continue;
            }
            assert!((model.coefficients[j][0] - c_qps[j]).abs() < 1e-8, "qps slot {j}");
            assert!((model.coefficients[j][1] - c_p[j]).abs() < 1e-8, "p503 slot {j}");
        }
        for r in &recs {
            let y = model.predict(&r.inputs());
            assert!((y[0] - r.qps).abs() < 1e-8);
        }
    }

    #[test]
    fn ridge_limit_is_training_mean() {
        let (recs, _, _) = linear_records(100);
        let model = ridge_fit(&recs, 1e14).unwrap();
        let scaler = fit_scaler(&recs).unwrap();
        let y = model.predict(&recs[0].inputs());
        assert!((y[0] - scaler.output_mean[0]).abs() < 1e-6 * scaler.output_std[0]);
        assert!((y[1] - scaler.output_mean[1]).abs() < 1e-6 * scaler.output_std[1]);
        assert!(model.coefficients.iter().all(|c| c[0].abs() < 1e-8 && c[1].abs() < 1e-8));
    }

    #[test]
    fn ols_on_collinear_inputs_is_singular() {
        let mut recs = generate_dataset(&Profile::s3(), 50, 2, &BackendConfig::default()).unwrap();
        for r in &mut recs {
            r.rules.max_pending_requests = r.rules.max_connections * 2;
        }
        match ridge_fit(&recs, 0.0) {
            Err(Error::Numeric { reason, .. }) => assert!(reason.contains("lambda")),
            other => panic!("expected numeric error, got {other:?}"),
        }
        assert!(ridge_fit(&recs, 1.0).is_ok());
        assert!(ridge_fit(&recs[..5], 1.0).is_err());
    }

    #[test]
    fn evaluate_mse_reference_points() {
        let recs = generate_dataset(&Profile::s2(), 60, 8, &BackendConfig::default()).unwrap();
        let scaler = fit_scaler(&recs).unwrap();
        let perfect = evaluate_mse(|x| {
            let r = recs.iter().find(|r| &r.inputs() == x).unwrap();
            Ok(r.outputs())
        }, &recs, &scaler);
        // duplicated inputs would make the lookup ambiguous; S2 samples are distinct here
        assert!(perfect.unwrap() < 1e-24);
        let mean = [scaler.output_mean[0], scaler.output_mean[1]];
        let m = evaluate_mse(|_| Ok(mean), &recs, &scaler).unwrap();
        assert!((m - 1.0).abs() < 1e-12, "{m}");
        assert!(evaluate_mse(|_| Ok(mean), &[], &scaler).is_err());
    }

    #[test]
    fn constant_targets_are_learned() {
        let mut recs = generate_dataset(&Profile::s1(), 120, 3, &BackendConfig::default()).unwrap();
        for r in &mut recs {
            r.qps = 250.0;
            r.p503 = 0.3;
        }
        let (train, test) = (&recs[..], &recs[..]);
        let hyper = TrainingHyper {
            learning_rate: 1e-4,
            epochs: 100,
            batch_size: 16,
            seed: 1,
        };
        let (model, curves) = train_surrogate(train, test, &hyper, "S1").unwrap();
        assert!(curves.best_test_mse < 1e-3, "{:?}", curves.test_mse);
        let y = model.predict(&test[0].inputs()).unwrap();
        assert!((y[0] - 250.0).abs() < 0.1 && (y[1] - 0.3).abs() < 0.1, "{y:?}");
    }

    #[test]
    fn training_is_deterministic_and_keeps_best() {
        let recs = generate_dataset(&Profile::s2(), 150, 5, &BackendConfig::default()).unwrap();
        let (train, test) = recs.split_at(120);
        let hyper = TrainingHyper {
            learning_rate: 1e-4,
            epochs: 6,
            batch_size: 32,
            seed: 9,
        };
        let (m1, c1) = train_surrogate(train, test, &hyper, "S2").unwrap();
        let (m2, c2) = train_surrogate(train, test, &hyper, "S2").unwrap();
        assert_eq!(c1, c2);
        assert_eq!(m1, m2);
        assert_eq!(c1.train_mse.len(), 6);
        assert!(c1.best_test_mse <= *c1.test_mse.last().unwrap());
        let min = c1.test_mse.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(c1.best_test_mse, min);
    }

    #[test]
    fn model_file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let net = DenseNet::new(&SURROGATE_DIMS, 3).unwrap();
        let model = SurrogateModel::new(net, unit_scaler(), "S4").unwrap();
        let path = dir.path().join("m.json");
        save_model(&model, &path).unwrap();
        let back = load_model(&path).unwrap();
        assert_eq!(back, model);
        let x = [3.0, 4.0, 5.0, 180.0, 10.0, 1.0, 14.0, 15.0, 400.0];
        assert_eq!(back.predict(&x).unwrap(), model.predict(&x).unwrap());

        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() - 20]).unwrap();
        assert!(matches!(load_model(&path), Err(Error::Format(_))));

        save_weights(&WeightFile::from_net(&model.net, None, None), &path).unwrap();
        match load_model(&path) {
            Err(Error::Format(msg)) => assert!(msg.contains("scaler")),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_hyper() {
        let recs = generate_dataset(&Profile::s2(), 20, 5, &BackendConfig::default()).unwrap();
        let bad = TrainingHyper { learning_rate: -1.0, ..Default::default() };
        assert!(train_surrogate(&recs[..10], &recs[10..], &bad, "S2").is_err());
        assert!(train_surrogate(&recs, &[], &TrainingHyper::default(), "S2").is_err());
    }
}
