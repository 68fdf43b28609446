use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::suite::TheoryConfig;
use crate::acquisition::AcquisitionStrategy;
use crate::benchmarks::{Benchmark, BenchmarkId};
use crate::error::{Error, Result};
use crate::optimizer::{ModelConfig, RunSpec};
use crate::sim::{Mode, SimConfig, StopRule, TimeDistribution};

/// One experiment: a single strategy in a single mode, repeated over seeds
/// `base_seed, base_seed + 1, ...`.
///
/// Exactly one of `horizon` and `budget` must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub benchmark: BenchmarkId,
    pub mode: Mode,
    pub strategy: AcquisitionStrategy,
    pub workers: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    pub times: TimeDistribution,
    /// Rescale `times` to mean 1 before use.
    #[serde(default)]
    pub unit_mean: bool,
    /// Observation noise standard deviation; the benchmark default if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sd: Option<f64>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Number of points on the by-time regret grid.
    #[serde(default = "default_time_grid")]
    pub time_grid: usize,
    #[serde(default = "default_keep_traces")]
    pub keep_traces: bool,
    /// Also run the theory suite and attach its report to the bundle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<TheoryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_runs() -> usize {
    1
}
fn default_time_grid() -> usize {
    100
}
fn default_keep_traces() -> bool {
    true
}

impl ExperimentConfig {
    /// Minimal config; every optional field at its default.
    pub fn new(
        benchmark: BenchmarkId,
        mode: Mode,
        strategy: AcquisitionStrategy,
        workers: usize,
        stop: StopRule,
        times: TimeDistribution,
    ) -> Self {
        let (horizon, budget) = match stop {
            StopRule::Horizon(t) => (Some(t), None),
            StopRule::Budget(n) => (None, Some(n)),
        };
        ExperimentConfig {
            benchmark,
            mode,
            strategy,
            workers,
            horizon,
            budget,
            times,
            unit_mean: false,
            noise_sd: None,
            model: ModelConfig::default(),
            runs: default_runs(),
            base_seed: 0,
            time_grid: default_time_grid(),
            keep_traces: default_keep_traces(),
            theory: None,
            output: None,
        }
    }

    /// Parse and validate. Errors name the offending field.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(
                path.display().to_string(),
                format!("cannot read config: {e}"),
            )
        })?;
        Self::from_json_str(&text)
    }

    /// Pretty JSON with fields in declaration order; parses back to `self`.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serialises");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        self.stop()?;
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers", "must be at least 1"));
        }
        if self.time_grid == 0 {
            return Err(Error::config("time_grid", "must be at least 1"));
        }
        if let Some(sd) = self.noise_sd {
            if !(sd >= 0.0 && sd.is_finite()) {
                return Err(Error::config(
                    "noise_sd",
                    format!("must be a non-negative number, got {sd}"),
                ));
            }
        }
        self.effective_times()?;
        self.model
            .validate()
            .map_err(|e| Error::config("model", e.to_string()))?;
        if let Some(t) = &self.theory {
            t.validate()?;
        }
        Ok(())
    }

    pub fn stop(&self) -> Result<StopRule> {
        match (self.horizon, self.budget) {
            (Some(t), None) if t > 0.0 && t.is_finite() => Ok(StopRule::Horizon(t)),
            (Some(t), None) => Err(Error::config(
                "horizon",
                format!("must be positive, got {t}"),
            )),
            (None, Some(n)) if n > 0 => Ok(StopRule::Budget(n)),
            (None, Some(_)) => Err(Error::config("budget", "must be at least 1")),
            _ => Err(Error::config(
                "horizon",
                "set exactly one of `horizon` and `budget`",
            )),
        }
    }

    /// The evaluation-time law actually simulated.
    pub fn effective_times(&self) -> Result<TimeDistribution> {
        let times = self
            .times
            .validated()
            .map_err(|e| Error::config("times", e.to_string()))?;
        if !self.unit_mean {
            return Ok(times);
        }
        let scaled = times
            .with_unit_mean()
            .map_err(|e| Error::config("unit_mean", e.to_string()))?;
        let mean = scaled.mean().unwrap_or(f64::INFINITY);
        if (mean - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                "unit_mean",
                format!("normalised mean is {mean}, not 1"),
            ));
        }
        Ok(scaled)
    }

    pub fn benchmark(&self) -> Result<Benchmark> {
        match self.noise_sd {
            Some(sd) => Benchmark::with_noise(self.benchmark, sd),
            None => Ok(Benchmark::new(self.benchmark)),
        }
    }

    pub fn run_spec(&self) -> Result<RunSpec> {
        Ok(RunSpec {
            benchmark: self.benchmark()?,
            strategy: self.strategy.clone(),
            sim: SimConfig {
                mode: self.mode,
                workers: self.workers,
                stop: self.stop()?,
                times: self.effective_times()?,
            },
            model: self.model,
        })
    }

    /// Report label such as `asyTS` or `seqRand`.
    pub fn label(&self) -> String {
        format!("{}{}", self.mode.prefix(), self.strategy.kind().label())
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.runs as u64).map(|i| self.base_seed.wrapping_add(i))
    }
}
