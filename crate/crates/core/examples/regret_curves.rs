//! Run asynchronous Thompson sampling on Branin over several seeds and print
//! the averaged simple-regret curves.
//!
//! Run with: `cargo run --release --example regret_curves`

use parallel_thompson::acquisition::{AcquisitionStrategy, StrategyKind};
use parallel_thompson::benchmarks::BenchmarkId;
use parallel_thompson::harness::{run_experiment, ExperimentConfig};
use parallel_thompson::sim::{Mode, StopRule, TimeDistribution};

fn main() {
    let mut cfg = ExperimentConfig::new(
        BenchmarkId::Branin,
        Mode::Asynchronous,
        AcquisitionStrategy::new(StrategyKind::Ts),
        4,
        StopRule::Horizon(20.0),
        TimeDistribution::uniform(0.5, 1.5).unwrap(),
    );
    cfg.runs = 6;
    cfg.time_grid = 10;
    let bundle = run_experiment(&cfg).unwrap();

    println!("{} on {}, {} runs", bundle.label, cfg.benchmark, cfg.runs);
    println!("\n  time    regret  stderr");
    for p in &bundle.by_time.points {
        println!("  {:>5.1}  {:>7.4}  {:.4}", p.coordinate, p.mean, p.stderr);
    }
    println!("\n  evals   regret  stderr");
    for p in bundle.by_count.points.iter().step_by(10) {
        println!("  {:>5}  {:>7.4}  {:.4}", p.coordinate, p.mean, p.stderr);
    }
    let s = bundle.summary();
    println!("\nsummary: {}", serde_json::to_string(&s).unwrap());
}
