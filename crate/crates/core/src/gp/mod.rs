//! Gaussian-process regression: kernels, exact conditioning, joint sampling
//! and marginal-likelihood hyperparameter search.

mod fit;
mod kernel;
mod posterior;

pub use fit::{fit_hyperparams, fit_hyperparams_in, FitRanges, FittedModel};
pub use kernel::{Kernel, KernelFamily};
pub use posterior::{log_marginal_likelihood, Dataset, GpPosterior};

pub(crate) use posterior::check_unit_cube;
