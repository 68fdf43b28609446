//! Tour of the benchmark functions: dimensions, optima and noisy evaluations.
//!
//! Run with: `cargo run --release --example benchmarks`

use parallel_thompson::benchmarks::{Benchmark, BenchmarkId};
use parallel_thompson::qmc::Kronecker;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    println!(
        "{:<13} {:>3} {:>6} {:>12} {:>12} {:>12}",
        "name", "d", "noise", "opt", "f(centre)", "noisy"
    );
    for id in BenchmarkId::ALL {
        let b = Benchmark::new(id);
        let centre = vec![0.5; b.dim()];
        println!(
            "{:<13} {:>3} {:>6} {:>12.6} {:>12.6} {:>12.6}",
            id.name(),
            b.dim(),
            b.noise_sd,
            b.opt_value(),
            b.eval_clean(&centre).unwrap(),
            b.eval_noisy(&centre, &mut rng).unwrap()
        );
    }

    let b = Benchmark::new(BenchmarkId::Hartmann6);
    let seq = Kronecker::new(b.dim());
    let best = (0..50_000)
        .map(|n| b.eval_clean(&seq.point(n)).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    println!(
        "\nhartmann6: best of 50000 quasi-random points {best:.4}, simple regret {:.4}",
        b.opt_value() - best
    );
}
