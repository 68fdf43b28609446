//! Park1 with ten workers and half-normal evaluation times: sequential,
//! synchronous and asynchronous Thompson sampling against asynchronous random
//! search, by evaluation count and by wall-clock time.
//!
//! Each seed block of `runs` seeds checks three orderings:
//! seqTS ≤ asyTS + SE at n = 200, asyTS ≤ synTS + SE at T = 30, and
//! asyTS ≤ asyRand − SE at T = 30. With more than one block the example
//! reports how many blocks satisfy all three.
//!
//! Run with: `cargo run --release --example parallel_comparison -- [runs] [blocks]`
//! (defaults: 20 runs, 1 block; one block takes a few minutes on one core).

use parallel_thompson::acquisition::{AcquisitionStrategy, StrategyKind};
use parallel_thompson::benchmarks::BenchmarkId;
use parallel_thompson::harness::{run_experiment, ExperimentConfig};
use parallel_thompson::metrics::Axis;
use parallel_thompson::sim::{Mode, StopRule, TimeDistribution};

fn regret(mode: Mode, kind: StrategyKind, stop: StopRule, runs: usize, base: u64) -> (f64, f64) {
    let mut cfg = ExperimentConfig::new(
        BenchmarkId::Park1,
        mode,
        AcquisitionStrategy::new(kind),
        10,
        stop,
        TimeDistribution::half_normal(1.0).unwrap(),
    );
    cfg.unit_mean = true;
    cfg.runs = runs;
    cfg.base_seed = base;
    cfg.keep_traces = false;
    let (axis, x) = match stop {
        StopRule::Budget(n) => (Axis::ByCount, n as f64),
        StopRule::Horizon(t) => (Axis::ByTime, t),
    };
    let bundle = run_experiment(&cfg).unwrap();
    let p = bundle.curve(axis).mean_at(x).unwrap();
    (p.mean, p.stderr)
}

fn main() {
    let mut args = std::env::args().skip(1);
    let runs: usize = args.next().map_or(20, |a| a.parse().expect("runs"));
    let blocks: u64 = args.next().map_or(1, |a| a.parse().expect("blocks"));
    let n = StopRule::Budget(200);
    let t = StopRule::Horizon(30.0);
    let mut passed = 0;
    for block in 0..blocks {
        let base = block * runs as u64;
        let seq = regret(Mode::Sequential, StrategyKind::Ts, n, runs, base);
        let asy_n = regret(Mode::Asynchronous, StrategyKind::Ts, n, runs, base);
        let asy = regret(Mode::Asynchronous, StrategyKind::Ts, t, runs, base);
        let syn = regret(Mode::Synchronous, StrategyKind::Ts, t, runs, base);
        let rnd = regret(Mode::Asynchronous, StrategyKind::Random, t, runs, base);
        let ok = [
            seq.0 <= asy_n.0 + asy_n.1,
            asy.0 <= syn.0 + syn.1,
            asy.0 <= rnd.0 - rnd.1,
        ];
        println!(
            "seeds {base}..{}: n=200 seqTS {:.3}±{:.3} asyTS {:.3}±{:.3} | T=30 asyTS {:.3}±{:.3} synTS {:.3}±{:.3} asyRand {:.3}±{:.3} | {ok:?}",
            base + runs as u64 - 1,
            seq.0, seq.1, asy_n.0, asy_n.1, asy.0, asy.1, syn.0, syn.1, rnd.0, rnd.1
        );
        if ok.iter().all(|&b| b) {
            passed += 1;
        }
    }
    println!("{passed}/{blocks} seed blocks satisfy all three orderings");
}
