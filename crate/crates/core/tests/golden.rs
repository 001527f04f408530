//! Frozen outputs that guard against unintended behaviour changes.

use meshrl::datagen::{generate_dataset, split_dataset, Profile};
use meshrl::mesh_sim::{simulate_with_stats, BackendConfig, LoadAction, TrafficRules};
use meshrl::surrogate::{clamp_rate, train_surrogate, TrainingHyper};

#[test]
fn s1_midpoint_load_test() {
    let rules = TrafficRules {
        max_pending_requests: 4,
        max_connections: 4,
        max_requests_per_connection: 4,
        ejection_time_s: 180.0,
        max_ejection_pct: 100.0,
        interval_s: 1.0,
        consecutive_errors: 1,
    };
    let load = LoadAction { threads: 3, calls: 435 };
    let (r, s) = simulate_with_stats(&rules, &load, &BackendConfig::default(), 42).unwrap();
    assert_eq!((s.ok, s.backend_503, s.overflow_503, s.no_host_503), (129, 10, 0, 296));
    assert_eq!(s.ejections, 3);
    assert_eq!(r.p503, 306.0 / 435.0);
    assert_eq!(r.qps, 435.0 / s.makespan_s);
    assert!((r.qps - 433.293_817_920_199).abs() < 1e-9, "{}", r.qps);
}

#[test]
fn s2_surrogate_quality_band() {
    let profile = Profile::s2();
    let records = generate_dataset(&profile, 1500, 3, &BackendConfig::default()).unwrap();
    let (train, test) = split_dataset(&records, 0.8, 3).unwrap();
    let hyper = TrainingHyper { learning_rate: 1e-4, epochs: 15, batch_size: 64, seed: 3 };
    let (model, curves) = train_surrogate(&train, &test, &hyper, &profile.name).unwrap();

    assert!(
        (0.15..0.35).contains(&curves.best_test_mse),
        "best test MSE {}",
        curves.best_test_mse
    );
    assert!(curves.best_test_mse <= *curves.test_mse.last().unwrap());
    assert_eq!(curves.test_mse[curves.best_epoch], curves.best_test_mse);
    let rate = clamp_rate(&model, &test).unwrap();
    assert!(rate <= 0.05, "clamped on {:.1}% of held-out rows", rate * 100.0);
}
