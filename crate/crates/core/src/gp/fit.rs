//! Hyperparameter selection by seeded random search over the marginal likelihood.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, KernelFamily};
use super::posterior::{log_marginal_likelihood, Dataset};
use crate::error::{Error, Result};

/// Search box for the random search. Scale and noise bounds are multiples of
/// the sample variance of the observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRanges {
    pub bandwidth: (f64, f64),
    pub scale_rel: (f64, f64),
    pub noise_rel: (f64, f64),
}

impl Default for FitRanges {
    fn default() -> Self {
        FitRanges {
            bandwidth: (0.01, 2.0),
            scale_rel: (0.1, 10.0),
            noise_rel: (1e-4, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub kernel: Kernel,
    pub noise_var: f64,
    pub mean_const: f64,
    pub log_likelihood: f64,
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Fit bandwidths, scale and (unless `noise_known`) noise variance using the
/// default search box.
pub fn fit_hyperparams<R: Rng + ?Sized>(
    data: &Dataset,
    family: KernelFamily,
    noise_known: Option<f64>,
    budget: usize,
    rng: &mut R,
) -> Result<FittedModel> {
    fit_hyperparams_in(data, family, noise_known, budget, FitRanges::default(), rng)
}

pub fn fit_hyperparams_in<R: Rng + ?Sized>(
    data: &Dataset,
    family: KernelFamily,
    noise_known: Option<f64>,
    budget: usize,
    ranges: FitRanges,
    rng: &mut R,
) -> Result<FittedModel> {
    if budget == 0 {
        return Err(Error::invalid(
            "hyperparameter search budget must be at least 1",
        ));
    }
    if data.len() < 2 {
        return Err(Error::invalid(format!(
            "hyperparameter fitting needs at least 2 observations, got {}",
            data.len()
        )));
    }
    let dim = data.dim().expect("non-empty dataset");
    let mean_const = data.median().expect("non-empty dataset");
    let v = data.sample_variance().max(1e-8);
    let scale_range = (ranges.scale_rel.0 * v, ranges.scale_rel.1 * v);
    let noise_range = (ranges.noise_rel.0 * v, ranges.noise_rel.1 * v);

    let mut best: Option<FittedModel> = None;
    for _ in 0..budget {
        let bandwidths: Vec<f64> = (0..dim)
            .map(|_| log_uniform(rng, ranges.bandwidth))
            .collect();
        let scale = log_uniform(rng, scale_range);
        let noise_var = match noise_known {
            Some(n) => n,
            None => log_uniform(rng, noise_range),
        };
        let kernel = Kernel::new(family, bandwidths, scale)?;
        let Ok(ll) = log_marginal_likelihood(&kernel, data, noise_var, mean_const) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| ll > b.log_likelihood) {
            best = Some(FittedModel {
                kernel,
                noise_var,
                mean_const,
                log_likelihood: ll,
            });
        }
    }
    best.ok_or(Error::SingularGram {
        max_jitter: crate::linalg::MAX_JITTER,
    })
}
