//! Locate each base benchmark's maximiser with a 10⁶-point quasi-random
//! sweep plus a shrinking coordinate pattern search, and compare against the
//! recorded optimum.
//!
//! Run with: `cargo run --release --example benchmark_optima`

use parallel_thompson::benchmarks::{sweep_max, Benchmark, BenchmarkId};

fn refine(b: &Benchmark, mut x: Vec<f64>, mut fx: f64) -> (Vec<f64>, f64) {
    let mut step = 1e-3;
    while step > 1e-13 {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [-1.0, 1.0] {
                let mut y = x.clone();
                y[i] = (y[i] + dir * step).clamp(0.0, 1.0);
                let fy = b.eval_clean(&y).unwrap();
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx)
}

fn main() {
    let bases = [
        BenchmarkId::Branin,
        BenchmarkId::CurrinExp,
        BenchmarkId::Hartmann3,
        BenchmarkId::Park1,
        BenchmarkId::Park2,
        BenchmarkId::Hartmann6,
    ];
    for id in bases {
        let b = Benchmark::new(id);
        let (x0, f0) = sweep_max(&b, 1_000_000, 0);
        let (x, fx) = refine(&b, x0, f0);
        println!(
            "{id:<11} sweep+refine max {fx:.17}  recorded {:.17}  worst_dev {:.6}",
            b.opt_value(),
            b.worst_dev()
        );
        println!("            argmax {x:?}");
        let at_recorded = b.eval_clean(&b.argmax()).unwrap();
        println!("            f(recorded argmax) = {at_recorded:.17}");
    }
}
