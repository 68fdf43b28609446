//! Config-driven experiment runner and report emitter.

pub mod cli;
mod config;
mod suite;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::ExperimentConfig;
pub use suite::{run_theory_suite, CheckResult, Relation, TheoryConfig, TheoryReport};

use crate::error::{Error, Result};
use crate::metrics::{
    average_on_grid, bayes_average, simple_regret_by_count, simple_regret_by_time, AveragedCurve,
    Axis, RegretCurve,
};
use crate::optimizer::run_simulation;
use crate::sim::{StopRule, Trace};

/// Everything produced by one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    /// Effective config; re-running it reproduces the bundle exactly.
    pub config: ExperimentConfig,
    pub label: String,
    /// `(seed, trace)` in seed order; empty when traces were not kept.
    pub traces: Vec<(u64, Trace)>,
    pub by_count: AveragedCurve,
    pub by_time: AveragedCurve,
    pub theory: Option<TheoryReport>,
}

/// Summary of a bundle written next to the CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub label: String,
    pub runs: usize,
    pub final_count: Option<f64>,
    pub final_count_regret: Option<f64>,
    pub final_time: Option<f64>,
    pub final_time_regret: Option<f64>,
}

const CONFIG_FILE: &str = "config.json";
const BY_COUNT_FILE: &str = "by_count.csv";
const BY_TIME_FILE: &str = "by_time.csv";
const SUMMARY_FILE: &str = "summary.json";
const THEORY_FILE: &str = "theory.json";
const TRACE_DIR: &str = "traces";

fn trace_file(seed: u64) -> String {
    format!("seed_{seed}.csv")
}

/// Run every seed (in parallel) and average the regret curves.
///
/// The by-count grid stops at the smallest evaluation count over the runs.
/// The by-time grid has `time_grid` equally spaced points ending at the
/// horizon, or at the latest finish time under a budget.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ReportBundle> {
    config.validate()?;
    let spec = config.run_spec()?;
    let seeds: Vec<u64> = config.seeds().collect();
    let outcomes: Vec<Result<Trace>> = seeds
        .par_iter()
        .map(|&s| run_simulation(&spec, s))
        .collect();
    let mut traces = Vec::with_capacity(seeds.len());
    for (&seed, outcome) in seeds.iter().zip(outcomes) {
        let trace = outcome.map_err(|e| Error::RunFailed {
            seed,
            source: Box::new(e),
        })?;
        traces.push((seed, trace));
    }

    let label = config.label();
    let opt = spec.benchmark.opt_value();
    let worst = spec.benchmark.worst_dev();

    let count_len = traces.iter().map(|(_, t)| t.len()).min().unwrap_or(0);
    let count_grid: Vec<f64> = (1..=count_len).map(|n| n as f64).collect();
    let t_end = match spec.sim.stop {
        StopRule::Horizon(t) => t,
        StopRule::Budget(_) => traces
            .iter()
            .flat_map(|(_, t)| t.records.iter().map(|r| r.finish_time))
            .fold(0.0, f64::max),
    };
    let g = config.time_grid;
    let time_grid: Vec<f64> = (1..=g).map(|i| t_end * i as f64 / g as f64).collect();

    let mut count_curves = Vec::with_capacity(traces.len());
    let mut time_curves = Vec::with_capacity(traces.len());
    for (seed, trace) in &traces {
        let mut c = simple_regret_by_count(trace, opt);
        let mut t = simple_regret_by_time(trace, &time_grid, opt, worst)?;
        for curve in [&mut c, &mut t] {
            curve.meta.seed = *seed;
            curve.meta.strategy = label.clone();
            curve.meta.benchmark = config.benchmark.name().to_string();
        }
        count_curves.push(c);
        time_curves.push(t);
    }
    let by_count = average(&count_curves, &count_grid, Axis::ByCount, &label)?;
    let by_time = average(&time_curves, &time_grid, Axis::ByTime, &label)?;

    let theory = config.theory.as_ref().map(run_theory_suite).transpose()?;
    if !config.keep_traces {
        traces.clear();
    }
    Ok(ReportBundle {
        config: config.clone(),
        label,
        traces,
        by_count,
        by_time,
        theory,
    })
}

fn average(curves: &[RegretCurve], grid: &[f64], axis: Axis, label: &str) -> Result<AveragedCurve> {
    let mut avg = if grid.is_empty() {
        AveragedCurve {
            axis,
            label: String::new(),
            points: Vec::new(),
        }
    } else if curves.len() >= 2 {
        bayes_average(curves, grid)?
    } else {
        average_on_grid(curves, grid)?
    };
    avg.label = label.to_string();
    Ok(avg)
}

impl ReportBundle {
    pub fn summary(&self) -> BundleSummary {
        let last = |c: &AveragedCurve| c.points.last().map(|p| (p.coordinate, p.mean));
        BundleSummary {
            label: self.label.clone(),
            runs: self.config.runs,
            final_count: last(&self.by_count).map(|p| p.0),
            final_count_regret: last(&self.by_count).map(|p| p.1),
            final_time: last(&self.by_time).map(|p| p.0),
            final_time_regret: last(&self.by_time).map(|p| p.1),
        }
    }

    pub fn curve(&self, axis: Axis) -> &AveragedCurve {
        match axis {
            Axis::ByCount => &self.by_count,
            Axis::ByTime => &self.by_time,
        }
    }

    /// Write `config.json`, `summary.json`, both curve CSVs, per-seed trace
    /// CSVs under `traces/`, and `theory.json` when present.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(CONFIG_FILE), self.config.to_json_string())?;
        fs::write(dir.join(SUMMARY_FILE), to_json_pretty(&self.summary()))?;
        fs::write(dir.join(BY_COUNT_FILE), self.by_count.to_csv_string())?;
        fs::write(dir.join(BY_TIME_FILE), self.by_time.to_csv_string())?;
        if !self.traces.is_empty() {
            let tdir = dir.join(TRACE_DIR);
            fs::create_dir_all(&tdir)?;
            for (seed, trace) in &self.traces {
                fs::write(tdir.join(trace_file(*seed)), trace.to_csv_string())?;
            }
        }
        if let Some(report) = &self.theory {
            fs::write(dir.join(THEORY_FILE), to_json_pretty(report))?;
        }
        Ok(())
    }

    /// Read a bundle written by [`ReportBundle::write_to`].
    pub fn load(dir: &Path) -> Result<Self> {
        let config = ExperimentConfig::from_path(&dir.join(CONFIG_FILE))?;
        let label = config.label();
        let curve = |file: &str, axis: Axis| -> Result<AveragedCurve> {
            AveragedCurve::read_csv(fs::File::open(dir.join(file))?, axis, label.clone())
        };
        let by_count = curve(BY_COUNT_FILE, Axis::ByCount)?;
        let by_time = curve(BY_TIME_FILE, Axis::ByTime)?;
        let spec = config.run_spec()?;
        let mut traces = Vec::new();
        for seed in config.seeds() {
            let path = dir.join(TRACE_DIR).join(trace_file(seed));
            if path.exists() {
                let records = Trace::read_records(fs::File::open(path)?)?;
                traces.push((
                    seed,
                    Trace {
                        records,
                        mode: config.mode,
                        workers: spec.sim.effective_workers(),
                        stop: spec.sim.stop,
                    },
                ));
            }
        }
        let theory_path = dir.join(THEORY_FILE);
        let theory = if theory_path.exists() {
            Some(serde_json::from_str(&fs::read_to_string(theory_path)?)?)
        } else {
            None
        };
        Ok(ReportBundle {
            config,
            label,
            traces,
            by_count,
            by_time,
            theory,
        })
    }
}

pub(crate) fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

/// Write one `coordinate,mean,stderr,run_count` CSV per bundle and axis,
/// named `<label>_<axis>.csv`, all restricted to the coordinates every
/// bundle shares on that axis. `which = None` writes both axes.
pub fn emit_plot_data(
    bundles: &[ReportBundle],
    which: Option<Axis>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if bundles.is_empty() {
        return Err(Error::invalid("no bundles to emit plot data for"));
    }
    for (i, b) in bundles.iter().enumerate() {
        if bundles[..i].iter().any(|o| o.label == b.label) {
            return Err(Error::invalid(format!(
                "two bundles share the label `{}`",
                b.label
            )));
        }
    }
    let axes = match which {
        Some(a) => vec![a],
        None => vec![Axis::ByCount, Axis::ByTime],
    };
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for axis in axes {
        let shared: Vec<f64> = bundles[0]
            .curve(axis)
            .points
            .iter()
            .map(|p| p.coordinate)
            .filter(|x| bundles.iter().all(|b| b.curve(axis).mean_at(*x).is_some()))
            .collect();
        if shared.is_empty() {
            return Err(Error::invalid(format!(
                "bundles share no {} coordinates",
                axis_name(axis)
            )));
        }
        for b in bundles {
            let c = b.curve(axis);
            let aligned = AveragedCurve {
                axis,
                label: c.label.clone(),
                points: shared
                    .iter()
                    .filter_map(|x| c.mean_at(*x).copied())
                    .collect(),
            };
            let path = out_dir.join(format!("{}_{}.csv", b.label, axis_name(axis)));
            fs::write(&path, aligned.to_csv_string())?;
            written.push(path);
        }
    }
    Ok(written)
}

fn axis_name(axis: Axis) -> &'static str {
    match axis {
        Axis::ByCount => "by_count",
        Axis::ByTime => "by_time",
    }
}
