//! Runs a short experiment, replays the best window in the simulator and
//! writes summaries plus per-epoch curves for plotting.
//!
//! cargo run --example validate_run -- /tmp/meshrl-report

use std::path::PathBuf;

use meshrl::harness::{emit_report, load_run, run_all, save_run, validate_best, ExperimentConfig, Paradigm};

fn main() -> meshrl::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map_or_else(|| std::env::temp_dir().join("meshrl-report"), PathBuf::from);
    std::fs::create_dir_all(&dir).map_err(|e| meshrl::Error::Format(e.to_string()))?;

    // With the simulator as environment the replay reproduces the run.
    let config = ExperimentConfig {
        paradigm: Paradigm::SingleThread,
        profiles: vec!["S4".into()],
        oracle: true,
        epochs: 30,
        interactions: 10,
        repeats: 2,
        seed: 8,
        ..Default::default()
    };
    let mut run = run_all(&config)?;
    for report in &mut run.reports {
        let v = validate_best(report, &config, config.seed)?;
        println!("repeat {}: simulated {:.6} validated {:.6}", report.repeat, report.simulated_ratio, v);
        report.validated_ratio = Some(v);
    }

    let run_path = dir.join("run.json");
    save_run(&run, &run_path)?;
    let agg = emit_report(&load_run(&run_path)?, &dir)?;
    println!("mean simulated {:.4}; files in {}", agg.simulated_ratio, dir.display());
    Ok(())
}
