//! Several services learn call counts through one shared state block and
//! per-service heads, rewarded with their own product reward plus the mean
//! over all services.
//!
//! cargo run --example collaborative_services

use meshrl::agents::{ActionSpace, CollabNets, StateEncoder};
use meshrl::datagen::{LoadKind, Profile};
use meshrl::harness::{run_all, ExperimentConfig, Paradigm};

fn main() -> meshrl::Result<()> {
    let profiles = [Profile::s2(), Profile::s3(), Profile::s5()];

    let encoders = profiles
        .iter()
        .map(|p| StateEncoder::rules_and(p, LoadKind::Threads))
        .collect::<meshrl::Result<Vec<_>>>()?;
    let spaces = profiles
        .iter()
        .map(|p| ActionSpace::for_profile(p, LoadKind::Calls))
        .collect::<meshrl::Result<Vec<_>>>()?;
    let nets = CollabNets::new(encoders, spaces, 4, false)?;
    let shared = (0..nets.services())
        .map(|n| nets.snet_for(n).map(|s| std::ptr::eq(s, nets.snet_for(0).unwrap())))
        .collect::<meshrl::Result<Vec<_>>>()?;
    println!("{} services, one shared block: {:?}", nets.services(), shared);

    let config = ExperimentConfig {
        paradigm: Paradigm::CollabCall,
        profiles: profiles.iter().map(|p| p.name.clone()).collect(),
        oracle: true,
        epochs: 25,
        interactions: 12,
        repeats: 1,
        seed: 4,
        beta: 0.5,
        ..Default::default()
    };
    let report = &run_all(&config)?.reports[0];
    println!("summed-reward ratio {:.3} at epoch {}", report.simulated_ratio, report.best_epoch);
    Ok(())
}
