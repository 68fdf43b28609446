//! Bayesian-optimisation policy driven by the simulator.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acquisition::{AcquisitionStrategy, InFlightSet};
use crate::benchmarks::Benchmark;
use crate::error::{Error, Result};
use crate::gp::{fit_hyperparams, Dataset, GpPosterior, Kernel, KernelFamily};
use crate::qmc::candidate_set;
use crate::sim::{simulate, EvaluationRecord, Observation, Policy, SimConfig, Trace};

/// Independent random streams derived from one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Times = 0,
    Selection = 1,
    Noise = 2,
    Fit = 3,
    Init = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_family")]
    pub family: KernelFamily,
    /// Uniformly random initial evaluations before the strategy takes over.
    #[serde(default = "default_n_init")]
    pub n_init: usize,
    /// Hyperparameters are refit each time the completed count reaches a new
    /// multiple of this period.
    #[serde(default = "default_refit_period")]
    pub refit_period: usize,
    /// Quasi-uniform candidates per decision.
    #[serde(default = "default_candidate_count")]
    pub candidate_count: usize,
    /// Random-search draws per hyperparameter refit.
    #[serde(default = "default_fit_budget")]
    pub fit_budget: usize,
}

fn default_family() -> KernelFamily {
    KernelFamily::SquaredExponential
}
fn default_n_init() -> usize {
    10
}
fn default_refit_period() -> usize {
    25
}
fn default_candidate_count() -> usize {
    500
}
fn default_fit_budget() -> usize {
    100
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            family: default_family(),
            n_init: default_n_init(),
            refit_period: default_refit_period(),
            candidate_count: default_candidate_count(),
            fit_budget: default_fit_budget(),
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.refit_period == 0 {
            return Err(Error::invalid("refit_period must be at least 1"));
        }
        if self.candidate_count == 0 {
            return Err(Error::invalid("candidate_count must be at least 1"));
        }
        if self.fit_budget == 0 {
            return Err(Error::invalid("fit_budget must be at least 1"));
        }
        Ok(())
    }
}

/// Everything needed to reproduce one simulated optimisation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub benchmark: Benchmark,
    pub strategy: AcquisitionStrategy,
    pub sim: SimConfig,
    pub model: ModelConfig,
}

/// Prior used until two observations exist to fit against.
const PRIOR_BANDWIDTH: f64 = 0.2;
const PRIOR_SCALE: f64 = 1.0;
const PRIOR_NOISE_VAR: f64 = 0.01;

pub struct BayesOptPolicy {
    benchmark: Benchmark,
    strategy: AcquisitionStrategy,
    model: ModelConfig,
    data: Dataset,
    kernel: Kernel,
    noise_var: f64,
    /// Completed count at the last refit; `None` before the first fit.
    last_fit: Option<usize>,
    select_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    fit_rng: ChaCha8Rng,
    init_rng: ChaCha8Rng,
}

impl BayesOptPolicy {
    pub fn new(
        benchmark: Benchmark,
        strategy: AcquisitionStrategy,
        model: ModelConfig,
        seed: u64,
    ) -> Result<Self> {
        model.validate()?;
        let kernel =
            Kernel::isotropic(model.family, benchmark.dim(), PRIOR_BANDWIDTH, PRIOR_SCALE)?;
        Ok(BayesOptPolicy {
            benchmark,
            strategy,
            model,
            data: Dataset::empty(),
            kernel,
            noise_var: PRIOR_NOISE_VAR,
            last_fit: None,
            select_rng: stream_rng(seed, Stream::Selection),
            noise_rng: stream_rng(seed, Stream::Noise),
            fit_rng: stream_rng(seed, Stream::Fit),
            init_rng: stream_rng(seed, Stream::Init),
        })
    }

    /// Hyperparameters currently in use.
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    fn absorb(&mut self, completed: &[EvaluationRecord]) -> Result<()> {
        for r in &completed[self.data.len()..] {
            self.data.push(r.point.clone(), r.value)?;
        }
        Ok(())
    }

    fn maybe_refit(&mut self) -> Result<()> {
        let n = self.data.len();
        if n < 2 {
            return Ok(());
        }
        let due = match self.last_fit {
            None => true,
            Some(prev) => n / self.model.refit_period > prev / self.model.refit_period,
        };
        if due {
            let fit = fit_hyperparams(
                &self.data,
                self.model.family,
                None,
                self.model.fit_budget,
                &mut self.fit_rng,
            )?;
            self.kernel = fit.kernel;
            self.noise_var = fit.noise_var;
            self.last_fit = Some(n);
        }
        Ok(())
    }

    fn posterior(&self) -> Result<GpPosterior> {
        let mean = self.data.median().unwrap_or(0.0);
        GpPosterior::condition(self.kernel.clone(), self.data.clone(), self.noise_var, mean)
    }
}

impl Policy for BayesOptPolicy {
    fn propose(
        &mut self,
        index: usize,
        completed: &[EvaluationRecord],
        in_flight: &InFlightSet,
    ) -> Result<Vec<f64>> {
        self.absorb(completed)?;
        let dim = self.benchmark.dim();
        if index <= self.model.n_init {
            return Ok((0..dim).map(|_| self.init_rng.random::<f64>()).collect());
        }
        let candidates = candidate_set(dim, self.model.candidate_count, &mut self.select_rng);
        let post = if self.strategy.kind().uses_model() {
            self.maybe_refit()?;
            self.posterior()?
        } else {
            // unused by the random strategy
            GpPosterior::prior(self.kernel.clone(), self.noise_var, 0.0)?
        };
        let pick =
            self.strategy
                .select(&post, &candidates, in_flight, index, &mut self.select_rng)?;
        Ok(candidates[pick].clone())
    }

    fn evaluate(&mut self, point: &[f64]) -> Result<Observation> {
        let clean_value = self.benchmark.eval_clean(point)?;
        let value = self.benchmark.eval_noisy(point, &mut self.noise_rng)?;
        Ok(Observation { value, clean_value })
    }
}

/// Simulate one optimisation run. All randomness derives from `seed`.
pub fn run_simulation(spec: &RunSpec, seed: u64) -> Result<Trace> {
    let mut policy = BayesOptPolicy::new(spec.benchmark, spec.strategy.clone(), spec.model, seed)?;
    let mut times = stream_rng(seed, Stream::Times);
    simulate(&spec.sim, &mut policy, &mut times)
}
