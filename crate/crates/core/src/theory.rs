//! Closed-form calculators and Monte Carlo validators for evaluation-time
//! order statistics, evaluation-count intervals, and information gain.
//!
//! Exponential times use the rate parametrisation throughout: `Exp(λ)` has
//! mean `θ = 1/λ`, and the mean of the maximum of `M` draws is `h_M / λ`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acquisition::greedy_variance_picks;
use crate::error::{Error, Result};
use crate::gp::{Dataset, GpPosterior, Kernel};
use crate::sim::{count_evaluations, Mode, SimConfig, StopRule, TimeDistribution};

/// `h_M = Σ_{i=1}^M 1/i`.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// How the mean of the maximum of `M` i.i.d. times is known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaxEstimate {
    Exact {
        value: f64,
    },
    /// Half-normal: Monte Carlo estimate plus the analytic upper bound `ζ√(2 log 2M)`.
    Bounded {
        monte_carlo: f64,
        upper: f64,
    },
    MonteCarlo {
        value: f64,
    },
}

impl MaxEstimate {
    /// Best single number for plugging into interval formulas.
    pub fn point(&self) -> f64 {
        match *self {
            MaxEstimate::Exact { value } | MaxEstimate::MonteCarlo { value } => value,
            MaxEstimate::Bounded { monte_carlo, .. } => monte_carlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxStats {
    pub dist: TimeDistribution,
    pub workers: usize,
    /// `θ = E X`; `None` when infinite.
    pub expected_single: Option<f64>,
    /// `θ_M = E max_{i ≤ M} X_i`.
    pub expected_max: MaxEstimate,
}

/// Monte Carlo mean of the maximum of `m` draws.
pub fn mc_expected_max<R: Rng + ?Sized>(
    dist: &TimeDistribution,
    m: usize,
    trials: usize,
    rng: &mut R,
) -> f64 {
    let mut total = 0.0;
    for _ in 0..trials {
        total += (0..m).map(|_| dist.sample(rng)).fold(0.0, f64::max);
    }
    total / trials as f64
}

const MC_BATCHES: usize = 64;

/// [`mc_expected_max`] split into independent batches run in parallel.
/// Batch `b` uses stream `b` of a generator seeded with `seed`, so the
/// result does not depend on the thread count.
pub fn mc_expected_max_seeded(dist: &TimeDistribution, m: usize, trials: usize, seed: u64) -> f64 {
    let total: f64 = (0..MC_BATCHES)
        .into_par_iter()
        .map(|b| {
            let n = trials / MC_BATCHES + usize::from(b < trials % MC_BATCHES);
            if n == 0 {
                return 0.0;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            mc_expected_max(dist, m, n, &mut rng) * n as f64
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    total / trials as f64
}

/// Mean of the maximum of `m` i.i.d. evaluation times. Uniform and
/// exponential are exact; half-normal and Pareto use `mc_trials` draws.
pub fn expected_max<R: Rng + ?Sized>(
    dist: &TimeDistribution,
    m: usize,
    mc_trials: usize,
    rng: &mut R,
) -> Result<MaxStats> {
    if m == 0 {
        return Err(Error::invalid("need at least one worker"));
    }
    dist.validated()?;
    let needs_mc = matches!(
        dist,
        TimeDistribution::HalfNormal { .. } | TimeDistribution::Pareto { .. }
    );
    if needs_mc && mc_trials == 0 {
        return Err(Error::invalid(
            "Monte Carlo estimate requested with zero trials",
        ));
    }
    let mf = m as f64;
    let expected_max = match *dist {
        TimeDistribution::Uniform { a, b } => MaxEstimate::Exact {
            value: (a + b * mf) / (mf + 1.0),
        },
        TimeDistribution::Exponential { lambda } => MaxEstimate::Exact {
            value: harmonic(m) / lambda,
        },
        TimeDistribution::HalfNormal { zeta_sq } => MaxEstimate::Bounded {
            monte_carlo: mc_expected_max(dist, m, mc_trials, rng),
            upper: zeta_sq.sqrt() * (2.0 * (2.0 * mf).ln()).sqrt(),
        },
        TimeDistribution::Pareto { .. } => MaxEstimate::MonteCarlo {
            value: mc_expected_max(dist, m, mc_trials, rng),
        },
    };
    Ok(MaxStats {
        dist: *dist,
        workers: m,
        expected_single: dist.mean(),
        expected_max,
    })
}

/// Order statistics of `m` i.i.d. `Exp(λ)` draws built from independent
/// spacings: the i-th largest is `Σ_{k=i}^{m} E_k / k`. Returned in
/// descending order (maximum first).
pub fn renyi_order_statistics<R: Rng + ?Sized>(
    m: usize,
    lambda: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::invalid("need at least one order statistic"));
    }
    let exp = TimeDistribution::exponential(lambda)?;
    let spacings: Vec<f64> = (1..=m).map(|k| exp.sample(rng) / k as f64).collect();
    let mut out = vec![0.0; m];
    let mut acc = 0.0;
    for i in (0..m).rev() {
        acc += spacings[i];
        out[i] = acc;
    }
    Ok(out)
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// High-probability interval for the number of evaluations completed by time `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NBoundInterval {
    pub mode: Mode,
    pub lower: f64,
    pub upper: f64,
    pub alpha: f64,
}

impl NBoundInterval {
    /// Strict containment, matching the open interval.
    pub fn contains(&self, n: f64) -> bool {
        self.lower < n && n < self.upper
    }
}

fn interval(
    mode: Mode,
    m: usize,
    horizon: f64,
    alpha: f64,
    theta: f64,
    theta_m: f64,
) -> NBoundInterval {
    let mf = m as f64;
    let (lower, upper) = match mode {
        Mode::Sequential => (
            horizon / (theta * (1.0 + alpha)) - 1.0,
            horizon / (theta * (1.0 - alpha)),
        ),
        Mode::Synchronous => (
            mf * (horizon / (theta_m * (1.0 + alpha)) - 1.0),
            mf * horizon / (theta_m * (1.0 - alpha)),
        ),
        Mode::Asynchronous => (
            mf * (horizon / (theta * (1.0 + alpha)) - 1.0),
            mf * horizon / (theta * (1.0 - alpha)),
        ),
    };
    NBoundInterval {
        mode,
        lower,
        upper,
        alpha,
    }
}

fn check_interval_args(m: usize, horizon: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::invalid(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if m == 0 {
        return Err(Error::invalid("need at least one worker"));
    }
    Ok(())
}

/// Interval for `N(T)` from closed-form `θ` and `θ_M`. Sequential mode
/// always uses one worker.
///
/// Fails for synchronous half-normal or Pareto times, whose `θ_M` has no
/// closed form; use [`n_bounds_monte_carlo`] there.
pub fn n_bounds(
    dist: &TimeDistribution,
    mode: Mode,
    m: usize,
    horizon: f64,
    alpha: f64,
) -> Result<NBoundInterval> {
    check_interval_args(m, horizon, alpha)?;
    let m = if mode == Mode::Sequential { 1 } else { m };
    let theta = dist
        .mean()
        .ok_or_else(|| Error::invalid("evaluation-time mean is infinite"))?;
    let theta_m = match (mode, dist) {
        (
            Mode::Synchronous,
            TimeDistribution::HalfNormal { .. } | TimeDistribution::Pareto { .. },
        ) => {
            return Err(Error::invalid(format!(
                "no closed-form θ_M for {} times; use the Monte Carlo variant",
                dist.family_name()
            )))
        }
        (Mode::Synchronous, _) => expected_max(dist, m, 0, &mut ChaCha8Rng::seed_from_u64(0))?
            .expected_max
            .point(),
        _ => theta,
    };
    Ok(interval(mode, m, horizon, alpha, theta, theta_m))
}

/// Like [`n_bounds`], estimating `θ_M` by Monte Carlo when it has no closed form.
pub fn n_bounds_monte_carlo<R: Rng + ?Sized>(
    dist: &TimeDistribution,
    mode: Mode,
    m: usize,
    horizon: f64,
    alpha: f64,
    mc_trials: usize,
    rng: &mut R,
) -> Result<NBoundInterval> {
    match n_bounds(dist, mode, m, horizon, alpha) {
        Ok(b) => Ok(b),
        Err(_) if mode == Mode::Synchronous => {
            check_interval_args(m, horizon, alpha)?;
            let theta = dist
                .mean()
                .ok_or_else(|| Error::invalid("evaluation-time mean is infinite"))?;
            let theta_m = expected_max(dist, m, mc_trials, rng)?.expected_max.point();
            Ok(interval(mode, m, horizon, alpha, theta, theta_m))
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coverage {
    pub interval: NBoundInterval,
    pub runs: usize,
    pub inside: usize,
    /// Mean evaluation count over the runs.
    pub mean_count: f64,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        self.inside as f64 / self.runs as f64
    }
}

/// Simulate `runs` schedules (no objective, zero model cost) and report how
/// often `N(T)` lands inside [`n_bounds`]. Small `T` is expected to fail.
pub fn validate_concentration<R: Rng + ?Sized>(
    dist: &TimeDistribution,
    mode: Mode,
    m: usize,
    horizon: f64,
    alpha: f64,
    runs: usize,
    rng: &mut R,
) -> Result<Coverage> {
    if runs < 100 {
        return Err(Error::invalid(format!(
            "concentration check needs at least 100 runs, got {runs}"
        )));
    }
    let bounds = n_bounds_monte_carlo(dist, mode, m, horizon, alpha, 100_000, rng)?;
    let seeds: Vec<u64> = (0..runs).map(|_| rng.random()).collect();
    let counts = evaluation_counts(dist, mode, m, horizon, &seeds)?;
    let inside = counts
        .iter()
        .filter(|&&n| bounds.contains(n as f64))
        .count();
    Ok(Coverage {
        interval: bounds,
        runs,
        inside,
        mean_count: counts.iter().sum::<usize>() as f64 / runs as f64,
    })
}

/// `N(T)` for each seed; runs execute in parallel and are returned in seed order.
pub fn evaluation_counts(
    dist: &TimeDistribution,
    mode: Mode,
    m: usize,
    horizon: f64,
    seeds: &[u64],
) -> Result<Vec<usize>> {
    let cfg = SimConfig {
        mode,
        workers: m,
        stop: StopRule::Horizon(horizon),
        times: *dist,
    };
    seeds
        .par_iter()
        .map(|&s| count_evaluations(&cfg, &mut ChaCha8Rng::seed_from_u64(s)))
        .collect()
}

/// Empirical `P(Z − E Z ≥ t)` for `Z` the maximum of `m` `Exp(λ)` draws,
/// next to the sub-exponential bound `2 exp(−t² λ² / 8)` (valid for `t ≤ 2/λ`).
pub fn exponential_max_tail<R: Rng + ?Sized>(
    lambda: f64,
    m: usize,
    t: f64,
    trials: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    let exp = TimeDistribution::exponential(lambda)?;
    if trials == 0 || m == 0 {
        return Err(Error::invalid("need at least one trial and one worker"));
    }
    let mean = harmonic(m) / lambda;
    let hits = (0..trials)
        .filter(|_| (0..m).map(|_| exp.sample(rng)).fold(0.0, f64::max) - mean >= t)
        .count();
    Ok((
        hits as f64 / trials as f64,
        2.0 * (-t * t * lambda * lambda / 8.0).exp(),
    ))
}

/// `I(y_A; f_A) = ½ log det(I + η⁻² K_A)`.
pub fn info_gain(kernel: &Kernel, points: &[Vec<f64>], noise_var: f64) -> Result<f64> {
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::invalid(format!(
            "noise variance must be positive, got {noise_var}"
        )));
    }
    for p in points {
        if p.len() != kernel.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.dim(),
                actual: p.len(),
            });
        }
    }
    let n = points.len();
    if n == 0 {
        return Ok(0.0);
    }
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        let k = kernel.k(&points[i], &points[j]) / noise_var;
        if i == j {
            1.0 + k
        } else {
            k
        }
    });
    let (chol, _) = crate::linalg::cholesky_with_jitter(&a, 1.0).ok_or(Error::SingularGram {
        max_jitter: crate::linalg::MAX_JITTER,
    })?;
    Ok(0.5 * crate::linalg::log_det(&chol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyMig {
    /// Candidate indices in selection order.
    pub indices: Vec<usize>,
    /// `info_gain` of the selected set.
    pub gain: f64,
    /// `½ log(1 + σ²_{j−1}(x_j)/η²)` for each pick; these sum to `gain`.
    pub marginal_gains: Vec<f64>,
}

/// Greedy lower bound on the maximum information gain of `n` points.
pub fn greedy_mig(
    kernel: &Kernel,
    candidates: &[Vec<f64>],
    n: usize,
    noise_var: f64,
) -> Result<GreedyMig> {
    if n > candidates.len() {
        return Err(Error::invalid(format!(
            "cannot pick {n} points from {} candidates",
            candidates.len()
        )));
    }
    if !(noise_var > 0.0) {
        return Err(Error::invalid("noise variance must be positive"));
    }
    for c in candidates {
        if c.len() != kernel.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.dim(),
                actual: c.len(),
            });
        }
    }
    let (indices, vars) = greedy_variance_picks(kernel, candidates, n, noise_var);
    let marginal_gains = vars
        .iter()
        .map(|v| 0.5 * (1.0 + v / noise_var).ln())
        .collect();
    let chosen: Vec<Vec<f64>> = indices.iter().map(|&i| candidates[i].clone()).collect();
    Ok(GreedyMig {
        gain: info_gain(kernel, &chosen, noise_var)?,
        indices,
        marginal_gains,
    })
}

/// `β_n = 4(d+1) log n + 2d log(d a b √π)`.
pub fn beta_n(n: usize, d: usize, a: f64, b: f64) -> Result<f64> {
    beta_n_real(n as f64, d, a, b)
}

/// [`beta_n`] for a real-valued step count `n ≥ 1`.
pub fn beta_n_real(n: f64, d: usize, a: f64, b: f64) -> Result<f64> {
    if !(n >= 1.0) || d == 0 || !(a > 0.0) || !(b > 0.0) {
        return Err(Error::invalid("beta_n needs n ≥ 1 and d, a, b > 0"));
    }
    let df = d as f64;
    Ok(4.0 * (df + 1.0) * n.ln() + 2.0 * df * (df * a * b * std::f64::consts::PI.sqrt()).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSum {
    /// `Σ_j σ²_{j−1}(x_j)`
    pub lhs: f64,
    /// `2 / log(1 + η⁻²) · I(f; y_{1:n})`
    pub rhs: f64,
    pub holds: bool,
}

/// Posterior variance of each point given the noisy observations of all
/// earlier points in the sequence.
fn sequential_variances(
    kernel: &Kernel,
    sequence: &[Vec<f64>],
    noise_var: f64,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(sequence.len());
    for j in 0..sequence.len() {
        let data = Dataset::new(sequence[..j].to_vec(), vec![0.0; j])?;
        let post = GpPosterior::condition(kernel.clone(), data, noise_var, 0.0)?;
        out.push(post.variance(&sequence[j]));
    }
    Ok(out)
}

/// Check `Σ σ²_{j−1}(x_j) ≤ 2/log(1+η⁻²) · I(f; y_{1:n})`, which holds
/// whenever `k(x,x) ≤ 1`.
pub fn variance_sum_check(
    kernel: &Kernel,
    sequence: &[Vec<f64>],
    noise_var: f64,
) -> Result<VarianceSum> {
    if sequence.is_empty() {
        return Err(Error::invalid("variance sum needs a non-empty sequence"));
    }
    let lhs: f64 = sequential_variances(kernel, sequence, noise_var)?
        .iter()
        .sum();
    let rhs = 2.0 / (1.0 + 1.0 / noise_var).ln() * info_gain(kernel, sequence, noise_var)?;
    Ok(VarianceSum {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-8,
    })
}

/// `I(f; y_B | y_A) = I(A ∪ B) − I(A)`.
pub fn conditional_info_gain(
    kernel: &Kernel,
    set_a: &[Vec<f64>],
    set_b: &[Vec<f64>],
    noise_var: f64,
) -> Result<f64> {
    if set_b.iter().any(|b| set_a.contains(b)) {
        return Err(Error::invalid("conditioning sets must be disjoint"));
    }
    let union: Vec<Vec<f64>> = set_a.iter().chain(set_b).cloned().collect();
    Ok((info_gain(kernel, &union, noise_var)? - info_gain(kernel, set_a, noise_var)?).max(0.0))
}

/// `σ_A(x) / σ_{A∪B}(x)` for noisy observations at `A` and `B`.
pub fn posterior_std_ratio(
    kernel: &Kernel,
    set_a: &[Vec<f64>],
    set_b: &[Vec<f64>],
    noise_var: f64,
    x: &[f64],
) -> Result<f64> {
    let post_a = GpPosterior::condition(
        kernel.clone(),
        Dataset::new(set_a.to_vec(), vec![0.0; set_a.len()])?,
        noise_var,
        0.0,
    )?;
    let post_ab = post_a.with_observations(set_b, &vec![0.0; set_b.len()])?;
    Ok(post_a.std_dev(x) / post_ab.std_dev(x))
}
