//! Trains a single call agent on S2 against a freshly fitted surrogate and
//! compares it with the random baseline.
//!
//! cargo run --example single_agent -- 30 100

use meshrl::datagen::{generate_dataset, split_dataset, Profile};
use meshrl::harness::{run_all, validate_best, ExperimentConfig, Paradigm};
use meshrl::mesh_sim::BackendConfig;
use meshrl::surrogate::{save_model, train_surrogate, TrainingHyper};

fn main() -> meshrl::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().expect("number"));
    let epochs = args.next().unwrap_or(30);
    let interactions = args.next().unwrap_or(100);

    let profile = Profile::s2();
    let records = generate_dataset(&profile, 1500, 11, &BackendConfig::default())?;
    let (train, test) = split_dataset(&records, 0.8, 11)?;
    let hyper = TrainingHyper { learning_rate: 1e-4, epochs: 15, batch_size: 64, seed: 11 };
    let (model, curves) = train_surrogate(&train, &test, &hyper, &profile.name)?;
    println!("surrogate test MSE {:.4}", curves.best_test_mse);
    let path = std::env::temp_dir().join("meshrl-single-agent-s2.json");
    save_model(&model, &path)?;

    let config = ExperimentConfig {
        paradigm: Paradigm::SingleCall,
        profiles: vec!["S2".into()],
        surrogates: vec![path],
        epochs,
        interactions,
        repeats: 1,
        seed: 11,
        ..Default::default()
    };
    let run = run_all(&config)?;
    let report = &run.reports[0];
    for (e, (rl, base)) in report.rl_cum_reward.iter().zip(&report.base_cum_reward).enumerate() {
        let ratio = report.rolling_ratio[e].map_or(String::new(), |r| format!("{r:.3}"));
        println!("epoch {e:>3}  agent {rl:>10.1}  random {base:>10.1}  {ratio}");
    }
    let validated = validate_best(report, &config, config.seed)?;
    println!(
        "best window ends at epoch {}: simulated {:.3}, replayed in the simulator {:.3}",
        report.best_epoch, report.simulated_ratio, validated
    );
    Ok(())
}
