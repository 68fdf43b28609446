use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of the wall-clock time one evaluation takes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeDistribution {
    Uniform {
        a: f64,
        b: f64,
    },
    /// `|N(0, ζ²)|`
    HalfNormal {
        zeta_sq: f64,
    },
    /// Rate parametrisation: mean `1/λ`.
    Exponential {
        lambda: f64,
    },
    /// Density `∝ x^{-(k+1)}` on `[x_min, ∞)`.
    Pareto {
        k: f64,
        x_min: f64,
    },
}

impl TimeDistribution {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        TimeDistribution::Uniform { a, b }.validated()
    }

    pub fn half_normal(zeta_sq: f64) -> Result<Self> {
        TimeDistribution::HalfNormal { zeta_sq }.validated()
    }

    pub fn exponential(lambda: f64) -> Result<Self> {
        TimeDistribution::Exponential { lambda }.validated()
    }

    pub fn pareto(k: f64, x_min: f64) -> Result<Self> {
        TimeDistribution::Pareto { k, x_min }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            TimeDistribution::Uniform { a, b } => a >= 0.0 && a < b && b.is_finite(),
            TimeDistribution::HalfNormal { zeta_sq } => zeta_sq > 0.0 && zeta_sq.is_finite(),
            TimeDistribution::Exponential { lambda } => lambda > 0.0 && lambda.is_finite(),
            TimeDistribution::Pareto { k, x_min } => {
                k > 0.0 && x_min > 0.0 && k.is_finite() && x_min.is_finite()
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::invalid(format!(
                "invalid time distribution parameters: {self:?}"
            )))
        }
    }

    /// One strictly positive draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            // (a, b]
            TimeDistribution::Uniform { a, b } => b - (b - a) * rng.random::<f64>(),
            TimeDistribution::HalfNormal { zeta_sq } => {
                let z: f64 = rng.sample(StandardNormal);
                zeta_sq.sqrt() * z.abs()
            }
            TimeDistribution::Exponential { lambda } => -open_unit(rng).ln() / lambda,
            TimeDistribution::Pareto { k, x_min } => x_min * open_unit(rng).powf(-1.0 / k),
        }
    }

    /// `E X`, or `None` for a Pareto law without a finite mean (`k ≤ 1`).
    pub fn mean(&self) -> Option<f64> {
        match *self {
            TimeDistribution::Uniform { a, b } => Some(0.5 * (a + b)),
            TimeDistribution::HalfNormal { zeta_sq } => Some(zeta_sq.sqrt() * (2.0 / PI).sqrt()),
            TimeDistribution::Exponential { lambda } => Some(1.0 / lambda),
            TimeDistribution::Pareto { k, x_min } => (k > 1.0).then(|| k * x_min / (k - 1.0)),
        }
    }

    /// Same family, rescaled so that `E X = 1`.
    pub fn with_unit_mean(&self) -> Result<Self> {
        let m = self.mean().ok_or_else(|| {
            Error::invalid("cannot normalise a distribution without a finite mean")
        })?;
        let scaled = match *self {
            TimeDistribution::Uniform { a, b } => TimeDistribution::Uniform { a: a / m, b: b / m },
            TimeDistribution::HalfNormal { zeta_sq } => TimeDistribution::HalfNormal {
                zeta_sq: zeta_sq / (m * m),
            },
            TimeDistribution::Exponential { lambda } => {
                TimeDistribution::Exponential { lambda: lambda * m }
            }
            TimeDistribution::Pareto { k, x_min } => TimeDistribution::Pareto {
                k,
                x_min: x_min / m,
            },
        };
        scaled.validated()
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            TimeDistribution::Uniform { .. } => "uniform",
            TimeDistribution::HalfNormal { .. } => "half_normal",
            TimeDistribution::Exponential { .. } => "exponential",
            TimeDistribution::Pareto { .. } => "pareto",
        }
    }
}

/// Uniform on (0, 1]: keeps logs and negative powers finite.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
