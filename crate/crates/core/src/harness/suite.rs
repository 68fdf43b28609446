use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::Kernel;
use crate::sim::{Mode, TimeDistribution};
use crate::theory::{
    beta_n, beta_n_real, evaluation_counts, exponential_max_tail, harmonic, info_gain,
    ks_statistic, mc_expected_max_seeded, n_bounds, renyi_order_statistics, validate_concentration,
    variance_sum_check,
};

/// Trial counts and tolerance for [`run_theory_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryConfig {
    /// Monte Carlo trials for expected-max and tail checks.
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Relative tolerance of Monte Carlo estimates against closed forms.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_concentration_runs")]
    pub concentration_runs: usize,
    #[serde(default = "default_throughput_runs")]
    pub throughput_runs: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_trials() -> usize {
    1_000_000
}
fn default_tolerance() -> f64 {
    0.01
}
fn default_concentration_runs() -> usize {
    500
}
fn default_throughput_runs() -> usize {
    200
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig {
            trials: default_trials(),
            tolerance: default_tolerance(),
            concentration_runs: default_concentration_runs(),
            throughput_runs: default_throughput_runs(),
            seed: 0,
        }
    }
}

impl TheoryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("theory.trials", "must be at least 1"));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(Error::config(
                "theory.tolerance",
                "must be a non-negative number",
            ));
        }
        if self.concentration_runs < 100 {
            return Err(Error::config(
                "theory.concentration_runs",
                "must be at least 100",
            ));
        }
        if self.throughput_runs < 2 {
            return Err(Error::config(
                "theory.throughput_runs",
                "must be at least 2",
            ));
        }
        Ok(())
    }
}

/// How `observed` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|observed − expected| ≤ tolerance · |expected|`
    RelativeError,
    /// `observed ≤ expected + tolerance`
    AtMost,
    /// `observed ≥ expected − tolerance`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl CheckResult {
    fn new(
        name: &str,
        params: &[(&str, f64)],
        expected: f64,
        observed: f64,
        tolerance: f64,
        relation: Relation,
    ) -> Self {
        let pass = match relation {
            Relation::RelativeError => (observed - expected).abs() <= tolerance * expected.abs(),
            Relation::AtMost => observed <= expected + tolerance,
            Relation::AtLeast => observed >= expected - tolerance,
        };
        CheckResult {
            name: name.to_string(),
            parameters: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            expected,
            observed,
            tolerance,
            relation,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub config: TheoryConfig,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

impl TheoryReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json_string(&self) -> String {
        super::to_json_pretty(self)
    }
}

const KS_THRESHOLD: f64 = 0.01;
const KS_TRIALS: usize = 100_000;
const CLOSED_FORM_TOL: f64 = 1e-12;

/// Run every validator. Only the Monte Carlo versus closed-form checks use
/// `config.tolerance`; bound checks and closed-form identities have fixed
/// thresholds.
pub fn run_theory_suite(config: &TheoryConfig) -> Result<TheoryReport> {
    config.validate()?;
    let mut stream = 0u64;
    let mut next_rng = || {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(stream);
        stream += 1;
        rng
    };
    let tol = config.tolerance;
    let trials = config.trials;
    let mut checks = Vec::new();

    checks.push(CheckResult::new(
        "harmonic",
        &[("m", 10.0)],
        7381.0 / 2520.0,
        harmonic(10),
        CLOSED_FORM_TOL,
        Relation::RelativeError,
    ));

    let uniform = TimeDistribution::uniform(0.5, 1.5)?;
    for m in [1usize, 3, 10] {
        let exact = (0.5 + 1.5 * m as f64) / (m as f64 + 1.0);
        let mc = mc_expected_max_seeded(&uniform, m, trials, next_rng().random());
        checks.push(CheckResult::new(
            "expected_max_uniform",
            &[
                ("a", 0.5),
                ("b", 1.5),
                ("m", m as f64),
                ("trials", trials as f64),
            ],
            exact,
            mc,
            tol,
            Relation::RelativeError,
        ));
    }

    let exponential = TimeDistribution::exponential(1.0)?;
    for m in [1usize, 3, 10] {
        let mc = mc_expected_max_seeded(&exponential, m, trials, next_rng().random());
        checks.push(CheckResult::new(
            "expected_max_exponential",
            &[("lambda", 1.0), ("m", m as f64), ("trials", trials as f64)],
            harmonic(m),
            mc,
            tol,
            Relation::RelativeError,
        ));
    }

    let half_normal = TimeDistribution::half_normal(1.0)?;
    for m in [2usize, 10, 100] {
        let mc = mc_expected_max_seeded(&half_normal, m, trials, next_rng().random());
        let params = [("zeta", 1.0), ("m", m as f64), ("trials", trials as f64)];
        checks.push(CheckResult::new(
            "expected_max_half_normal_upper",
            &params,
            (2.0 * (2.0 * m as f64).ln()).sqrt(),
            mc,
            0.0,
            Relation::AtMost,
        ));
        checks.push(CheckResult::new(
            "expected_max_half_normal_lower",
            &params,
            (2.0 / std::f64::consts::PI).sqrt(),
            mc,
            0.0,
            Relation::AtLeast,
        ));
    }

    for m in [2usize, 5, 20] {
        let mut rng = next_rng();
        let renyi: Vec<f64> = (0..KS_TRIALS)
            .map(|_| renyi_order_statistics(m, 1.0, &mut rng).map(|v| v[0]))
            .collect::<Result<_>>()?;
        let direct: Vec<f64> = (0..KS_TRIALS)
            .map(|_| {
                (0..m)
                    .map(|_| exponential.sample(&mut rng))
                    .fold(0.0, f64::max)
            })
            .collect();
        checks.push(CheckResult::new(
            "renyi_ks",
            &[
                ("lambda", 1.0),
                ("m", m as f64),
                ("trials", KS_TRIALS as f64),
            ],
            KS_THRESHOLD,
            ks_statistic(&renyi, &direct),
            0.0,
            Relation::AtMost,
        ));
        let mean = renyi.iter().sum::<f64>() / renyi.len() as f64;
        checks.push(CheckResult::new(
            "renyi_mean_max",
            &[
                ("lambda", 1.0),
                ("m", m as f64),
                ("trials", KS_TRIALS as f64),
            ],
            harmonic(m),
            mean,
            tol,
            Relation::RelativeError,
        ));
    }

    for (family, dist) in [("uniform", uniform), ("exponential", exponential)] {
        for mode in [Mode::Sequential, Mode::Synchronous, Mode::Asynchronous] {
            let mut rng = next_rng();
            let cov = validate_concentration(
                &dist,
                mode,
                4,
                200.0,
                0.3,
                config.concentration_runs,
                &mut rng,
            )?;
            checks.push(CheckResult::new(
                &format!("concentration_{family}_{}", mode.prefix()),
                &[
                    ("m", 4.0),
                    ("horizon", 200.0),
                    ("alpha", 0.3),
                    ("runs", config.concentration_runs as f64),
                ],
                0.95,
                cov.fraction(),
                0.0,
                Relation::AtLeast,
            ));
        }
    }

    checks.extend(throughput_checks(
        config.throughput_runs,
        next_rng().random(),
    )?);

    for t in [0.5, 1.0] {
        let mut rng = next_rng();
        let (freq, bound) = exponential_max_tail(1.0, 10, t, trials, &mut rng)?;
        checks.push(CheckResult::new(
            "exponential_max_tail",
            &[
                ("lambda", 1.0),
                ("m", 10.0),
                ("t", t),
                ("trials", trials as f64),
            ],
            bound,
            freq,
            0.0,
            Relation::AtMost,
        ));
    }

    let e = std::f64::consts::E;
    checks.push(CheckResult::new(
        "beta_n",
        &[("n", e), ("d", 1.0), ("a", 1.0), ("b", 1.0)],
        8.0 + std::f64::consts::PI.ln(),
        beta_n_real(e, 1, 1.0, 1.0)?,
        CLOSED_FORM_TOL,
        Relation::RelativeError,
    ));
    let ab = 1.0 / std::f64::consts::PI.sqrt();
    checks.push(CheckResult::new(
        "beta_n_vanishes",
        &[("n", 1.0), ("d", 1.0), ("a", ab), ("b", 1.0)],
        0.0,
        beta_n(1, 1, ab, 1.0)?.abs(),
        CLOSED_FORM_TOL,
        Relation::AtMost,
    ));

    let kernel = Kernel::se(1, 0.3, 1.0)?;
    checks.push(CheckResult::new(
        "info_gain_single_point",
        &[("kappa", 1.0), ("noise_var", 1.0)],
        0.5 * 2f64.ln(),
        info_gain(&kernel, &[vec![0.5]], 1.0)?,
        CLOSED_FORM_TOL,
        Relation::RelativeError,
    ));
    let vs = variance_sum_check(&kernel, &[vec![0.5]], 1.0)?;
    checks.push(CheckResult::new(
        "variance_sum_equality",
        &[("kappa", 1.0), ("noise_var", 1.0)],
        vs.rhs,
        vs.lhs,
        1e-8,
        Relation::RelativeError,
    ));

    let b = n_bounds(&exponential, Mode::Asynchronous, 8, 30.0, 0.2)?;
    let nb_params = [
        ("lambda", 1.0),
        ("m", 8.0),
        ("horizon", 30.0),
        ("alpha", 0.2),
    ];
    checks.push(CheckResult::new(
        "n_bounds_asy_lower",
        &nb_params,
        192.0,
        b.lower,
        CLOSED_FORM_TOL,
        Relation::RelativeError,
    ));
    checks.push(CheckResult::new(
        "n_bounds_asy_upper",
        &nb_params,
        300.0,
        b.upper,
        CLOSED_FORM_TOL,
        Relation::RelativeError,
    ));

    let passed = checks.iter().filter(|c| c.pass).count();
    Ok(TheoryReport {
        config: *config,
        passed,
        failed: checks.len() - passed,
        checks,
    })
}

/// Mean and standard error of evaluation counts.
fn count_stats(counts: &[usize]) -> (f64, f64) {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<usize>() as f64 / n;
    let var = counts
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// `N_seq < N_syn < N_asy` by at least three standard errors, and
/// `N_asy / N_syn` within 15% of `h_M` and at least `0.9 h_M`, for
/// `Exp(1)` times, `M = 8`, `T = 30`.
pub(crate) fn throughput_checks(runs: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let m = 8;
    let horizon = 30.0;
    let dist = TimeDistribution::exponential(1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..runs).map(|_| rng.random()).collect();
    let stats = |mode| evaluation_counts(&dist, mode, m, horizon, &seeds).map(|c| count_stats(&c));
    let (seq, seq_se) = stats(Mode::Sequential)?;
    let (syn, syn_se) = stats(Mode::Synchronous)?;
    let (asy, asy_se) = stats(Mode::Asynchronous)?;
    let params = [
        ("lambda", 1.0),
        ("m", m as f64),
        ("horizon", horizon),
        ("runs", runs as f64),
    ];
    let hm = harmonic(m);
    let ratio = asy / syn;
    Ok(vec![
        CheckResult::new(
            "throughput_syn_minus_seq",
            &params,
            3.0 * (seq_se.powi(2) + syn_se.powi(2)).sqrt(),
            syn - seq,
            0.0,
            Relation::AtLeast,
        ),
        CheckResult::new(
            "throughput_asy_minus_syn",
            &params,
            3.0 * (syn_se.powi(2) + asy_se.powi(2)).sqrt(),
            asy - syn,
            0.0,
            Relation::AtLeast,
        ),
        CheckResult::new(
            "throughput_ratio",
            &params,
            hm,
            ratio,
            0.15,
            Relation::RelativeError,
        ),
        CheckResult::new(
            "throughput_ratio_floor",
            &params,
            0.9 * hm,
            ratio,
            0.0,
            Relation::AtLeast,
        ),
    ])
}
