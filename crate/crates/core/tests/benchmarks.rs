use parallel_thompson::benchmarks::{base_value, Benchmark, BenchmarkId};
use parallel_thompson::qmc::Kronecker;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn branin_min_form(x1: f64, x2: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let b = 5.1 / (4.0 * pi * pi);
    let c = 5.0 / pi;
    let t = 1.0 / (8.0 * pi);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

const ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

fn hartmann(a: &[&[f64]], p: &[&[f64]], x: &[f64]) -> f64 {
    (0..4)
        .map(|i| {
            let s: f64 = x
                .iter()
                .enumerate()
                .map(|(j, xj)| a[i][j] * (xj - p[i][j] * 1e-4).powi(2))
                .sum();
            ALPHA[i] * (-s).exp()
        })
        .sum()
}

fn hartmann3(x: &[f64]) -> f64 {
    hartmann(
        &[
            &[3.0, 10.0, 30.0],
            &[0.1, 10.0, 35.0],
            &[3.0, 10.0, 30.0],
            &[0.1, 10.0, 35.0],
        ],
        &[
            &[3689.0, 1170.0, 2673.0],
            &[4699.0, 4387.0, 7470.0],
            &[1091.0, 8732.0, 5547.0],
            &[381.0, 5743.0, 8828.0],
        ],
        x,
    )
}

fn hartmann6(x: &[f64]) -> f64 {
    hartmann(
        &[
            &[10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
            &[0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
            &[3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
            &[17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
        ],
        &[
            &[1312.0, 1696.0, 5569.0, 124.0, 8283.0, 5886.0],
            &[2329.0, 4135.0, 8307.0, 3736.0, 1004.0, 9991.0],
            &[2348.0, 1451.0, 3522.0, 2883.0, 3047.0, 6650.0],
            &[4047.0, 8828.0, 8732.0, 5743.0, 1091.0, 381.0],
        ],
        x,
    )
}

#[test]
fn branin_at_known_minimiser() {
    let b = Benchmark::new(BenchmarkId::Branin);
    let (x1, x2) = (std::f64::consts::PI, 2.275);
    let u = [(x1 + 5.0) / 15.0, x2 / 15.0];
    let got = b.eval_clean(&u).unwrap();
    assert!((got + branin_min_form(x1, x2)).abs() < 1e-12);
    assert!((got + 0.397887).abs() < 1e-6);
}

#[test]
fn branin_matches_reference_everywhere() {
    let b = Benchmark::new(BenchmarkId::Branin);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let u = [rng.random::<f64>(), rng.random::<f64>()];
        let want = -branin_min_form(-5.0 + 15.0 * u[0], 15.0 * u[1]);
        assert!((b.eval_clean(&u).unwrap() - want).abs() < 1e-10 * want.abs().max(1.0));
    }
}

#[test]
fn hartmann_matches_reference() {
    let h3 = Benchmark::new(BenchmarkId::Hartmann3);
    let h6 = Benchmark::new(BenchmarkId::Hartmann6);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let x3: Vec<f64> = (0..3).map(|_| rng.random()).collect();
        let x6: Vec<f64> = (0..6).map(|_| rng.random()).collect();
        assert!((h3.eval_clean(&x3).unwrap() - hartmann3(&x3)).abs() < 1e-12);
        assert!((h6.eval_clean(&x6).unwrap() - hartmann6(&x6)).abs() < 1e-12);
    }
    assert!((hartmann6(&h6.argmax()) - 3.32237).abs() < 1e-5);
    assert!((hartmann3(&h3.argmax()) - 3.86278).abs() < 1e-5);
}

#[test]
fn compositions_are_sums_of_base_calls() {
    let cases = [
        (BenchmarkId::Hartmann12, BenchmarkId::Hartmann6, 2),
        (BenchmarkId::Park2_16, BenchmarkId::Park2, 4),
        (BenchmarkId::Hartmann18, BenchmarkId::Hartmann6, 3),
        (BenchmarkId::CurrinExp14, BenchmarkId::CurrinExp, 7),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (big, base, copies) in cases {
        let b = Benchmark::new(big);
        let k = base.dim();
        assert_eq!(b.dim(), k * copies);
        for _ in 0..100 {
            let x: Vec<f64> = (0..b.dim()).map(|_| rng.random()).collect();
            let parts: f64 = x.chunks(k).map(|c| base_value(base, c).unwrap()).sum();
            let single: f64 = x
                .chunks(k)
                .map(|c| Benchmark::new(base).eval_clean(c).unwrap())
                .sum();
            assert_eq!(b.eval_clean(&x).unwrap(), parts);
            assert_eq!(parts, single);
        }
    }
    let x: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37) % 1.0).collect();
    let want = hartmann6(&x[..6]) + hartmann6(&x[6..]);
    let got = Benchmark::new(BenchmarkId::Hartmann12)
        .eval_clean(&x)
        .unwrap();
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn argmax_attains_the_optimum() {
    for id in BenchmarkId::ALL {
        let b = Benchmark::new(id);
        let v = b.eval_clean(&b.argmax()).unwrap();
        assert!(
            (v - b.opt_value()).abs() < 1e-6,
            "{id}: {v} vs {}",
            b.opt_value()
        );
    }
}

#[test]
fn no_quasi_random_point_beats_the_optimum() {
    for id in BenchmarkId::ALL {
        let b = Benchmark::new(id);
        let seq = Kronecker::new(b.dim());
        let mut worst_gap: f64 = 0.0;
        for n in 0..100_000 {
            let x = seq.point(n);
            let v = b.eval_clean(&x).unwrap();
            assert!(v <= b.opt_value() + 1e-9, "{id} at {x:?}: {v}");
            worst_gap = worst_gap.max(b.opt_value() - v);
        }
        assert!(
            worst_gap <= b.worst_dev() + 1e-9 * b.worst_dev().abs(),
            "{id}"
        );
    }
}

#[test]
fn evaluation_is_pure() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for id in BenchmarkId::ALL {
        let b = Benchmark::new(id);
        let x: Vec<f64> = (0..b.dim()).map(|_| rng.random()).collect();
        assert_eq!(
            b.eval_clean(&x).unwrap().to_bits(),
            b.eval_clean(&x).unwrap().to_bits()
        );
    }
}

#[test]
fn observation_noise_contract() {
    let x = [0.3, 0.6];
    let clean = Benchmark::new(BenchmarkId::Branin).eval_clean(&x).unwrap();
    let quiet = Benchmark::with_noise(BenchmarkId::Branin, 0.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(quiet.eval_noisy(&x, &mut rng).unwrap(), clean);

    let noisy = Benchmark::with_noise(BenchmarkId::Branin, 0.2).unwrap();
    let n = 100_000;
    let ys: Vec<f64> = (0..n)
        .map(|_| noisy.eval_noisy(&x, &mut rng).unwrap())
        .collect();
    let mean = ys.iter().sum::<f64>() / n as f64;
    let sd = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!((sd / 0.2 - 1.0).abs() < 0.02);
    assert!((mean - clean).abs() < 4.0 * 0.2 / (n as f64).sqrt());
}
