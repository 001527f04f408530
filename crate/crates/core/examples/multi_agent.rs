//! Two agents per service, one picking threads and one picking calls, in the
//! three coordination modes. The simulator serves as the environment.
//!
//! cargo run --example multi_agent -- 25 20

use meshrl::harness::{run_all, ExperimentConfig, Paradigm};

fn main() -> meshrl::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>().expect("number"));
    let epochs = args.next().unwrap_or(25);
    let interactions = args.next().unwrap_or(20);

    for paradigm in [Paradigm::Independent, Paradigm::ThreadCall, Paradigm::CallThread] {
        let config = ExperimentConfig {
            paradigm,
            profiles: vec!["S3".into()],
            oracle: true,
            epochs,
            interactions,
            repeats: 1,
            seed: 21,
            ..Default::default()
        };
        let report = &run_all(&config)?.reports[0];
        println!(
            "{paradigm:<12} state dims {:?}  best ratio {:.3} at epoch {}",
            paradigm.state_dims(),
            report.simulated_ratio,
            report.best_epoch
        );
    }
    Ok(())
}
