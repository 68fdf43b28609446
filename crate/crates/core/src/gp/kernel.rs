use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    SquaredExponential,
    Matern52,
}

/// Stationary covariance function with one bandwidth per input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub family: KernelFamily,
    pub bandwidths: Vec<f64>,
    pub scale: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, bandwidths: Vec<f64>, scale: f64) -> Result<Self> {
        if bandwidths.is_empty() {
            return Err(Error::invalid("kernel needs at least one dimension"));
        }
        if let Some(h) = bandwidths.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
            return Err(Error::invalid(format!(
                "bandwidth must be positive, got {h}"
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel scale must be positive, got {scale}"
            )));
        }
        Ok(Kernel {
            family,
            bandwidths,
            scale,
        })
    }

    /// Same bandwidth `h` in every one of `dim` dimensions.
    pub fn isotropic(family: KernelFamily, dim: usize, h: f64, scale: f64) -> Result<Self> {
        Self::new(family, vec![h; dim], scale)
    }

    pub fn se(dim: usize, h: f64, scale: f64) -> Result<Self> {
        Self::isotropic(KernelFamily::SquaredExponential, dim, h, scale)
    }

    pub fn matern52(dim: usize, h: f64, scale: f64) -> Result<Self> {
        Self::isotropic(KernelFamily::Matern52, dim, h, scale)
    }

    pub fn dim(&self) -> usize {
        self.bandwidths.len()
    }

    /// `k(x, x')`, checking both arguments against the kernel dimension.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        for v in [x, y] {
            if v.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    actual: v.len(),
                });
            }
        }
        Ok(self.k(x, y))
    }

    /// Unchecked evaluation for hot loops where dimensions are already validated.
    #[inline]
    pub(crate) fn k(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(y.len(), self.dim());
        let r2: f64 = x
            .iter()
            .zip(y)
            .zip(&self.bandwidths)
            .map(|((a, b), h)| {
                let u = (a - b) / h;
                u * u
            })
            .sum();
        match self.family {
            KernelFamily::SquaredExponential => self.scale * (-0.5 * r2).exp(),
            KernelFamily::Matern52 => {
                let r = r2.sqrt();
                let s5r = 5f64.sqrt() * r;
                self.scale * (1.0 + s5r + 5.0 * r2 / 3.0) * (-s5r).exp()
            }
        }
    }

    /// Prior variance `k(x, x)`; constant for stationary kernels.
    pub fn prior_variance(&self) -> f64 {
        self.scale
    }
}
