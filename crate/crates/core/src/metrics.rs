//! Simple-regret curves and their averages across runs.
//!
//! Regret always uses the noise-free objective values of the evaluated points.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{fmt_f64, Mode, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Number of completed evaluations.
    ByCount,
    /// Simulated wall-clock time.
    ByTime,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub strategy: String,
    pub mode: Option<Mode>,
    pub workers: usize,
    pub benchmark: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub coordinate: f64,
    pub regret: f64,
}

/// Regret of a single run along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub axis: Axis,
    pub samples: Vec<CurvePoint>,
    pub meta: RunMeta,
}

impl RegretCurve {
    /// Step-function value at `x`: the last sample at or before `x`.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        let pos = self.samples.partition_point(|p| p.coordinate <= x);
        pos.checked_sub(1).map(|i| self.samples[i].regret)
    }

    pub fn last(&self) -> Option<f64> {
        self.samples.last().map(|p| p.regret)
    }
}

/// `S_n = f(x*) − max_{j ≤ n} f(x_j)` for `n = 1..N`, counting evaluations
/// in the order they finished.
pub fn simple_regret_by_count(trace: &Trace, opt_value: f64) -> RegretCurve {
    let mut best = f64::NEG_INFINITY;
    let samples = trace
        .by_finish_order()
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            best = best.max(r.clean_value);
            CurvePoint {
                coordinate: (i + 1) as f64,
                regret: opt_value - best,
            }
        })
        .collect();
    RegretCurve {
        axis: Axis::ByCount,
        samples,
        meta: meta_of(trace),
    }
}

fn meta_of(trace: &Trace) -> RunMeta {
    RunMeta {
        mode: Some(trace.mode),
        workers: trace.workers,
        ..RunMeta::default()
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid(
            "grid coordinates must be strictly increasing",
        ));
    }
    Ok(())
}

/// Regret after wall-clock time `t` for each `t` in `t_grid`; `worst_dev`
/// before anything has finished.
pub fn simple_regret_by_time(
    trace: &Trace,
    t_grid: &[f64],
    opt_value: f64,
    worst_dev: f64,
) -> Result<RegretCurve> {
    check_grid(t_grid)?;
    let finished = trace.by_finish_order();
    let mut next = 0;
    let mut best = f64::NEG_INFINITY;
    let mut samples = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        while next < finished.len() && finished[next].finish_time <= t {
            best = best.max(finished[next].clean_value);
            next += 1;
        }
        let regret = if next == 0 {
            worst_dev
        } else {
            opt_value - best
        };
        samples.push(CurvePoint {
            coordinate: t,
            regret,
        });
    }
    Ok(RegretCurve {
        axis: Axis::ByTime,
        samples,
        meta: meta_of(trace),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragedPoint {
    pub coordinate: f64,
    pub mean: f64,
    pub stderr: f64,
    /// Runs with a defined value at this coordinate.
    pub run_count: usize,
}

/// Pointwise mean and standard error of several runs' regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedCurve {
    pub axis: Axis,
    pub label: String,
    pub points: Vec<AveragedPoint>,
}

/// Bayes simple regret estimate: average of at least two runs on `grid`.
pub fn bayes_average(curves: &[RegretCurve], grid: &[f64]) -> Result<AveragedCurve> {
    if curves.len() < 2 {
        return Err(Error::invalid(format!(
            "averaging needs at least 2 curves, got {}",
            curves.len()
        )));
    }
    average_on_grid(curves, grid)
}

/// Like [`bayes_average`] but also accepts a single curve (standard error 0).
pub fn average_on_grid(curves: &[RegretCurve], grid: &[f64]) -> Result<AveragedCurve> {
    let Some(first) = curves.first() else {
        return Err(Error::invalid("no curves to average"));
    };
    if curves.iter().any(|c| c.axis != first.axis) {
        return Err(Error::invalid("cannot average curves on different axes"));
    }
    check_grid(grid)?;
    let points = grid
        .iter()
        .map(|&x| {
            let vals: Vec<f64> = curves.iter().filter_map(|c| c.value_at(x)).collect();
            let k = vals.len();
            let (mean, stderr) = match k {
                0 => (f64::NAN, f64::NAN),
                1 => (vals[0], 0.0),
                _ => {
                    let mean = vals.iter().sum::<f64>() / k as f64;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
                    (mean, (var / k as f64).sqrt())
                }
            };
            AveragedPoint {
                coordinate: x,
                mean,
                stderr,
                run_count: k,
            }
        })
        .collect();
    Ok(AveragedCurve {
        axis: first.axis,
        label: first.meta.strategy.clone(),
        points,
    })
}

impl AveragedCurve {
    pub fn mean_at(&self, x: f64) -> Option<&AveragedPoint> {
        self.points.iter().find(|p| p.coordinate == x)
    }

    /// CSV `coordinate,mean,stderr,run_count`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["coordinate", "mean", "stderr", "run_count"])?;
        for p in &self.points {
            out.write_record([
                fmt_f64(p.coordinate),
                fmt_f64(p.mean),
                fmt_f64(p.stderr),
                p.run_count.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    pub fn read_csv<R: Read>(r: R, axis: Axis, label: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["coordinate", "mean", "stderr", "run_count"] {
            return Err(Error::invalid(format!(
                "unexpected curve CSV header {headers:?}"
            )));
        }
        let mut points = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let num = |i: usize| -> Result<f64> {
                row[i]
                    .parse()
                    .map_err(|e| Error::invalid(format!("bad float `{}`: {e}", &row[i])))
            };
            points.push(AveragedPoint {
                coordinate: num(0)?,
                mean: num(1)?,
                stderr: num(2)?,
                run_count: row[3]
                    .parse()
                    .map_err(|e| Error::invalid(format!("bad run count `{}`: {e}", &row[3])))?,
            });
        }
        Ok(AveragedCurve {
            axis,
            label: label.into(),
            points,
        })
    }
}
