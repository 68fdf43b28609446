use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sequential,
    Synchronous,
    Asynchronous,
}

impl Mode {
    /// Prefix used in strategy labels (`seqTS`, `synTS`, `asyTS`).
    pub fn prefix(self) -> &'static str {
        match self {
            Mode::Sequential => "seq",
            Mode::Synchronous => "syn",
            Mode::Asynchronous => "asy",
        }
    }
}

/// When a simulated run ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Wall-clock horizon `T`; evaluations finishing after it are never observed.
    Horizon(f64),
    /// Total number of evaluations.
    Budget(usize),
}

/// One dispatched and completed evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    /// 1-based dispatch order.
    pub index: usize,
    pub worker: usize,
    pub dispatch_time: f64,
    pub finish_time: f64,
    /// Noisy observation revealed to the optimiser.
    pub value: f64,
    /// Noise-free objective value, used only for regret.
    pub clean_value: f64,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// Sorted by `index`.
    pub records: Vec<EvaluationRecord>,
    pub mode: Mode,
    pub workers: usize,
    pub stop: StopRule,
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn horizon(&self) -> Option<f64> {
        match self.stop {
            StopRule::Horizon(t) => Some(t),
            StopRule::Budget(_) => None,
        }
    }

    /// Number of evaluations finished by time `t`.
    pub fn count_completed(&self, t: f64) -> usize {
        self.records.iter().filter(|r| r.finish_time <= t).count()
    }

    /// Records ordered by finish time (ties by worker), i.e. the order in
    /// which results became known.
    pub fn by_finish_order(&self) -> Vec<&EvaluationRecord> {
        let mut v: Vec<&EvaluationRecord> = self.records.iter().collect();
        v.sort_by(|a, b| {
            a.finish_time
                .total_cmp(&b.finish_time)
                .then(a.worker.cmp(&b.worker))
        });
        v
    }

    /// CSV with columns `index, worker, dispatch_time, finish_time, value,
    /// clean_value, x0, x1, ...`; floats carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let dim = self.records.first().map_or(0, |r| r.point.len());
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = [
            "index",
            "worker",
            "dispatch_time",
            "finish_time",
            "value",
            "clean_value",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        header.extend((0..dim).map(|i| format!("x{i}")));
        out.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.index.to_string(),
                r.worker.to_string(),
                fmt_f64(r.dispatch_time),
                fmt_f64(r.finish_time),
                fmt_f64(r.value),
                fmt_f64(r.clean_value),
            ];
            row.extend(r.point.iter().map(|&c| fmt_f64(c)));
            out.write_record(&row)?;
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

    /// Parse the records written by [`Trace::write_csv`].
    pub fn read_records<R: Read>(r: R) -> Result<Vec<EvaluationRecord>> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut records = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let field = |i: usize| -> Result<&str> {
                row.get(i)
                    .ok_or_else(|| Error::invalid(format!("trace row has no column {i}")))
            };
            let num = |i: usize| -> Result<f64> {
                field(i)?
                    .parse()
                    .map_err(|e| Error::invalid(format!("bad float in column {i}: {e}")))
            };
            let int = |i: usize| -> Result<usize> {
                field(i)?
                    .parse()
                    .map_err(|e| Error::invalid(format!("bad integer in column {i}: {e}")))
            };
            records.push(EvaluationRecord {
                index: int(0)?,
                worker: int(1)?,
                dispatch_time: num(2)?,
                finish_time: num(3)?,
                value: num(4)?,
                clean_value: num(5)?,
                point: (6..row.len()).map(num).collect::<Result<_>>()?,
            });
        }
        Ok(records)
    }
}
