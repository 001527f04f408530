//! Fits the surrogate network on simulated traces and compares it with a
//! closed-form ridge regression on the same split.
//!
//! cargo run --example train_surrogate -- 15

use meshrl::datagen::{generate_dataset, split_dataset, Profile};
use meshrl::mesh_sim::BackendConfig;
use meshrl::surrogate::{evaluate_mse, ridge_fit, save_model, train_surrogate, TrainingHyper};

fn main() -> meshrl::Result<()> {
    let epochs: usize = std::env::args().nth(1).map_or(15, |s| s.parse().expect("epochs"));
    let profile = Profile::s2();
    let records = generate_dataset(&profile, 1500, 3, &BackendConfig::default())?;
    let (train, test) = split_dataset(&records, 0.8, 3)?;

    let hyper = TrainingHyper { learning_rate: 1e-4, epochs, batch_size: 64, seed: 3 };
    let (model, curves) = train_surrogate(&train, &test, &hyper, &profile.name)?;
    for (e, (tr, te)) in curves.train_mse.iter().zip(&curves.test_mse).enumerate() {
        println!("epoch {e:>3}  train {tr:.4}  test {te:.4}");
    }
    println!("kept epoch {} (test {:.4})", curves.best_epoch, curves.best_test_mse);

    let ridge = ridge_fit(&train, 1.0)?;
    let ridge_mse = evaluate_mse(|x| Ok(ridge.predict(x)), &test, &model.scaler)?;
    println!("ridge test {ridge_mse:.4}");

    let x = test[0].inputs();
    let y = model.predict(&x)?;
    println!("first test row: predicted qps {:.1} p503 {:.3}, simulated qps {:.1} p503 {:.3}",
        y[0], y[1], test[0].qps, test[0].p503);

    let path = std::env::temp_dir().join("meshrl-s2-model.json");
    save_model(&model, &path)?;
    println!("saved {}", path.display());
    Ok(())
}
