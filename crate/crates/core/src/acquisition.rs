//! Point-selection rules over a finite candidate set.
//!
//! Every selector returns the *index* of the chosen candidate. Ties are
//! broken towards the lowest index.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::gp::{GpPosterior, Kernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Ts,
    HallucinatedTs,
    Ucb,
    HallucinatedUcb,
    Ei,
    Random,
}

impl StrategyKind {
    /// Short label used in reports (`TS`, `HTS`, `UCB`, ...).
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Ts => "TS",
            StrategyKind::HallucinatedTs => "HTS",
            StrategyKind::Ucb => "UCB",
            StrategyKind::HallucinatedUcb => "HUCB",
            StrategyKind::Ei => "EI",
            StrategyKind::Random => "Rand",
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            StrategyKind::Ucb | StrategyKind::HallucinatedUcb => &["beta_scale"],
            _ => &[],
        }
    }

    pub fn uses_model(self) -> bool {
        self != StrategyKind::Random
    }
}

/// Default multiplier in `β_j = c · d · log(2j + 1)`.
pub const DEFAULT_BETA_SCALE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStrategy", into = "RawStrategy")]
pub struct AcquisitionStrategy {
    kind: StrategyKind,
    params: BTreeMap<String, f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrategy {
    kind: StrategyKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, f64>,
}

impl TryFrom<RawStrategy> for AcquisitionStrategy {
    type Error = Error;
    fn try_from(raw: RawStrategy) -> Result<Self> {
        AcquisitionStrategy::with_params(raw.kind, raw.params)
    }
}

impl From<AcquisitionStrategy> for RawStrategy {
    fn from(s: AcquisitionStrategy) -> Self {
        RawStrategy {
            kind: s.kind,
            params: s.params,
        }
    }
}

impl AcquisitionStrategy {
    pub fn new(kind: StrategyKind) -> Self {
        AcquisitionStrategy {
            kind,
            params: BTreeMap::new(),
        }
    }

    /// Rejects parameters the strategy does not understand.
    pub fn with_params(kind: StrategyKind, params: BTreeMap<String, f64>) -> Result<Self> {
        for (name, value) in &params {
            if !kind.allowed_params().contains(&name.as_str()) {
                return Err(Error::invalid(format!(
                    "unknown parameter `{name}` for strategy {}",
                    kind.label()
                )));
            }
            if !value.is_finite() || *value < 0.0 {
                return Err(Error::invalid(format!(
                    "parameter `{name}` must be a non-negative number"
                )));
            }
        }
        Ok(AcquisitionStrategy { kind, params })
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    fn beta_scale(&self) -> f64 {
        self.params
            .get("beta_scale")
            .copied()
            .unwrap_or(DEFAULT_BETA_SCALE)
    }

    /// Pick a candidate index for dispatch number `step` (1-based).
    ///
    /// `in_flight` holds the points other workers are still evaluating; only
    /// the hallucinated variants look at it.
    pub fn select<R: Rng + ?Sized>(
        &self,
        post: &GpPosterior,
        candidates: &[Vec<f64>],
        in_flight: &InFlightSet,
        step: usize,
        rng: &mut R,
    ) -> Result<usize> {
        match self.kind {
            StrategyKind::Ts => select_ts(post, candidates, rng),
            StrategyKind::HallucinatedTs => {
                select_ts(&hallucinate(post, in_flight)?, candidates, rng)
            }
            StrategyKind::Ucb => select_ucb_scaled(post, candidates, step, self.beta_scale()),
            StrategyKind::HallucinatedUcb => select_ucb_scaled(
                &hallucinate(post, in_flight)?,
                candidates,
                step,
                self.beta_scale(),
            ),
            StrategyKind::Ei => {
                let best = post
                    .data()
                    .values()
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max);
                let best = if best.is_finite() {
                    best
                } else {
                    post.mean_const()
                };
                select_ei(post, candidates, best)
            }
            StrategyKind::Random => select_random(candidates, rng),
        }
    }
}

/// Points dispatched to other workers whose results are not yet known.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InFlightSet {
    points: Vec<Vec<f64>>,
}

impl InFlightSet {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        InFlightSet { points }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, p: Vec<f64>) {
        self.points.push(p);
    }
}

impl From<Vec<Vec<f64>>> for InFlightSet {
    fn from(points: Vec<Vec<f64>>) -> Self {
        InFlightSet { points }
    }
}

/// Index of the largest value, lowest index on ties. NaN never wins.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

fn non_empty(candidates: &[Vec<f64>]) -> Result<()> {
    if candidates.is_empty() {
        Err(Error::invalid("candidate set is empty"))
    } else {
        Ok(())
    }
}

/// Thompson sampling: argmax of one joint posterior draw over the candidates.
pub fn select_ts<R: Rng + ?Sized>(
    post: &GpPosterior,
    candidates: &[Vec<f64>],
    rng: &mut R,
) -> Result<usize> {
    non_empty(candidates)?;
    if candidates.len() == 1 {
        return Ok(0);
    }
    let draw = post.sample_joint(candidates, rng)?;
    Ok(argmax(&draw).unwrap_or(0))
}

/// `β_j = scale · d · log(2j + 1)`.
pub fn ucb_beta(step: usize, dim: usize, scale: f64) -> f64 {
    scale * dim as f64 * (2.0 * step as f64 + 1.0).ln()
}

/// GP-UCB with the default `β_j = 0.2 d log(2j + 1)`.
pub fn select_ucb(post: &GpPosterior, candidates: &[Vec<f64>], step: usize) -> Result<usize> {
    select_ucb_scaled(post, candidates, step, DEFAULT_BETA_SCALE)
}

pub fn select_ucb_scaled(
    post: &GpPosterior,
    candidates: &[Vec<f64>],
    step: usize,
    beta_scale: f64,
) -> Result<usize> {
    non_empty(candidates)?;
    if step == 0 {
        return Err(Error::invalid("UCB step index starts at 1"));
    }
    let width = ucb_beta(step, post.dim(), beta_scale).sqrt();
    let (means, vars) = post.predict(candidates)?;
    let scores: Vec<f64> = means
        .iter()
        .zip(&vars)
        .map(|(m, v)| m + width * v.sqrt())
        .collect();
    Ok(argmax(&scores).unwrap_or(0))
}

pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Closed-form `E[max(g − best, 0)]` for `g ~ N(mean, sd²)`.
pub fn expected_improvement(mean: f64, sd: f64, best: f64) -> f64 {
    let gap = mean - best;
    if sd <= 0.0 {
        return gap.max(0.0);
    }
    let z = gap / sd;
    gap * std_normal_cdf(z) + sd * std_normal_pdf(z)
}

pub fn select_ei(post: &GpPosterior, candidates: &[Vec<f64>], best_y: f64) -> Result<usize> {
    non_empty(candidates)?;
    let (means, vars) = post.predict(candidates)?;
    let scores: Vec<f64> = means
        .iter()
        .zip(&vars)
        .map(|(m, v)| expected_improvement(*m, v.sqrt(), best_y))
        .collect();
    Ok(argmax(&scores).unwrap_or(0))
}

/// Condition on every in-flight point as if it had returned the current
/// posterior mean. The mean function is unchanged; variance shrinks around
/// the in-flight points.
pub fn hallucinate(post: &GpPosterior, in_flight: &InFlightSet) -> Result<GpPosterior> {
    if in_flight.is_empty() {
        return Ok(post.clone());
    }
    for p in in_flight.points() {
        crate::gp::check_unit_cube(p)?;
    }
    let (means, _) = post.predict(in_flight.points())?;
    post.with_observations(in_flight.points(), &means)
}

/// Greedy uncertainty sampling: each pick maximises the posterior variance
/// given the previous picks. Returns candidate indices in pick order.
///
/// The variance updates are rank-one downdates, so no observation values are
/// involved at any point.
pub fn uncertainty_init(
    kernel: &Kernel,
    candidates: &[Vec<f64>],
    n_init: usize,
    noise_var: f64,
) -> Result<Vec<usize>> {
    non_empty(candidates)?;
    if n_init == 0 {
        return Err(Error::invalid("n_init must be at least 1"));
    }
    if n_init > candidates.len() {
        return Err(Error::invalid(format!(
            "n_init = {n_init} exceeds the {} available candidates",
            candidates.len()
        )));
    }
    for c in candidates {
        if c.len() != kernel.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.dim(),
                actual: c.len(),
            });
        }
    }
    Ok(greedy_variance_picks(kernel, candidates, n_init, noise_var).0)
}

/// Greedy max-variance picks and the posterior variance each pick had just
/// before it was chosen. Inputs must already be validated.
pub(crate) fn greedy_variance_picks(
    kernel: &Kernel,
    candidates: &[Vec<f64>],
    count: usize,
    noise_var: f64,
) -> (Vec<usize>, Vec<f64>) {
    let m = candidates.len();
    let mut var: Vec<f64> = candidates.iter().map(|c| kernel.k(c, c)).collect();
    // factors[s][c]: contribution of pick s to the covariance with candidate c
    let mut factors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut picks = Vec::with_capacity(count);
    let mut pick_vars = Vec::with_capacity(count);
    for _ in 0..count {
        let pick = argmax(&var).unwrap_or(0);
        pick_vars.push(var[pick]);
        let denom = (var[pick] + noise_var).max(f64::MIN_POSITIVE).sqrt();
        let xs = &candidates[pick];
        let u: Vec<f64> = (0..m)
            .map(|c| {
                let prev: f64 = factors.iter().map(|f| f[c] * f[pick]).sum();
                (kernel.k(&candidates[c], xs) - prev) / denom
            })
            .collect();
        for c in 0..m {
            var[c] = (var[c] - u[c] * u[c]).max(0.0);
        }
        factors.push(u);
        picks.push(pick);
    }
    (picks, pick_vars)
}

pub fn select_random<R: Rng + ?Sized>(candidates: &[Vec<f64>], rng: &mut R) -> Result<usize> {
    non_empty(candidates)?;
    Ok(rng.random_range(0..candidates.len()))
}
