//! Simulate the three parallel modes with random evaluation times and
//! compare evaluation counts with the concentration intervals.
//!
//! Run with: `cargo run --release --example async_simulation`

use parallel_thompson::sim::{
    count_evaluations, simulate, Mode, NullPolicy, SimConfig, StopRule, TimeDistribution,
};
use parallel_thompson::theory::{evaluation_counts, expected_max, n_bounds_monte_carlo};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let workers = 4;
    let horizon = 12.0;
    let times = TimeDistribution::exponential(1.0).unwrap();

    let cfg = SimConfig {
        mode: Mode::Asynchronous,
        workers,
        stop: StopRule::Horizon(4.0),
        times,
    };
    let trace = simulate(&cfg, &mut NullPolicy, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    println!("first asynchronous evaluations (M = {workers}, T = 4):");
    println!("  index worker dispatch  finish");
    for r in &trace.records {
        println!(
            "  {:>5} {:>6} {:>8.3} {:>7.3}",
            r.index, r.worker, r.dispatch_time, r.finish_time
        );
    }

    let seeds: Vec<u64> = (0..500).collect();
    let theta_m = expected_max(&times, workers, 0, &mut ChaCha8Rng::seed_from_u64(0))
        .unwrap()
        .expected_max
        .point();
    println!("\nE[max of {workers} times] = {theta_m:.4} against E[time] = 1");
    println!("\nmode          mean N   interval (alpha = 0.3)");
    for mode in [Mode::Sequential, Mode::Synchronous, Mode::Asynchronous] {
        let counts = evaluation_counts(&times, mode, workers, horizon, &seeds).unwrap();
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        let b = n_bounds_monte_carlo(
            &times,
            mode,
            workers,
            horizon,
            0.3,
            100_000,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        println!(
            "{:<13} {:>6.2}   ({:.1}, {:.1})",
            format!("{mode:?}"),
            mean,
            b.lower,
            b.upper
        );
    }

    let single = count_evaluations(
        &SimConfig {
            mode: Mode::Asynchronous,
            workers,
            stop: StopRule::Horizon(horizon),
            times: TimeDistribution::half_normal(1.0)
                .unwrap()
                .with_unit_mean()
                .unwrap(),
        },
        &mut ChaCha8Rng::seed_from_u64(9),
    )
    .unwrap();
    println!("\none asynchronous run with unit-mean half-normal times: N = {single}");
}
