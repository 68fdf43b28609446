//! Fit a GP to noisy samples of a 1-d function and print the posterior.
//!
//! Run with: `cargo run --release --example gp_regression`

use parallel_thompson::gp::{fit_hyperparams, Dataset, GpPosterior, KernelFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn truth(x: f64) -> f64 {
    (6.0 * x).sin() + 0.5 * (15.0 * x).cos()
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 25;
    let noise_sd = 0.1;
    let points: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>()]).collect();
    let values: Vec<f64> = points
        .iter()
        .map(|p| truth(p[0]) + noise_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let data = Dataset::new(points, values).unwrap();

    for family in [KernelFamily::SquaredExponential, KernelFamily::Matern52] {
        let fit = fit_hyperparams(&data, family, None, 1000, &mut rng).unwrap();
        println!(
            "{family:?}: bandwidth {:.4}, scale {:.4}, noise var {:.5}, mean {:.4}, log evidence {:.3}",
            fit.kernel.bandwidths[0],
            fit.kernel.scale,
            fit.noise_var,
            fit.mean_const,
            fit.log_likelihood
        );
        let post = GpPosterior::condition(fit.kernel, data.clone(), fit.noise_var, fit.mean_const)
            .unwrap();
        let grid: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 / 10.0]).collect();
        let (mean, var) = post.predict(&grid).unwrap();
        println!("     x      f(x)    mean      sd");
        for ((x, m), v) in grid.iter().zip(&mean).zip(&var) {
            println!(
                "  {:.2}  {:>7.4} {:>7.4} {:>7.4}",
                x[0],
                truth(x[0]),
                m,
                v.sqrt()
            );
        }
        let draw = post.sample_joint(&grid, &mut rng).unwrap();
        println!("  one joint posterior draw: {:.3?}\n", draw);
    }
}
