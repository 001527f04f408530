//! Load-tests one service configuration and sweeps the call count.
//!
//! cargo run --example simulate_service

use meshrl::mesh_sim::{simulate_with_stats, BackendConfig, LoadAction, TrafficRules};

fn main() -> meshrl::Result<()> {
    let rules = TrafficRules {
        max_pending_requests: 4,
        max_connections: 4,
        max_requests_per_connection: 4,
        ejection_time_s: 180.0,
        max_ejection_pct: 100.0,
        interval_s: 1.0,
        consecutive_errors: 1,
    };
    let backend = BackendConfig::default();

    println!("{:>6} {:>10} {:>8} {:>6} {:>9} {:>8}", "calls", "qps", "p503", "ok", "overflow", "no_host");
    for calls in [50, 100, 200, 435, 800] {
        let load = LoadAction { threads: 3, calls };
        let (resp, stats) = simulate_with_stats(&rules, &load, &backend, 42)?;
        println!(
            "{calls:>6} {:>10.2} {:>8.4} {:>6} {:>9} {:>8}",
            resp.qps, resp.p503, stats.ok, stats.overflow_503, stats.no_host_503
        );
    }

    // A healthy backend with generous limits never fails.
    let roomy = TrafficRules {
        max_pending_requests: 64,
        max_connections: 64,
        max_requests_per_connection: 64,
        consecutive_errors: 5,
        ..rules
    };
    let clean = BackendConfig { base_fault_prob: 0.0, overload_slope: 0.0, ..backend };
    let resp = simulate_with_stats(&roomy, &LoadAction { threads: 2, calls: 200 }, &clean, 1)?.0;
    println!("fault-free: qps {:.2}, p503 {}", resp.qps, resp.p503);
    Ok(())
}
