//! Deterministic event loop for `M` simulated workers.
//!
//! Evaluation durations are drawn from the time stream when a job is
//! dispatched. Because durations never depend on the query point, a job that
//! would finish after the horizon is known to be unobservable at dispatch and
//! is dropped without consulting the policy. Dispatch indices therefore run
//! over observed evaluations only, `1..=N`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::time::TimeDistribution;
use super::trace::{EvaluationRecord, Mode, StopRule, Trace};
use crate::acquisition::InFlightSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: Mode,
    pub workers: usize,
    pub stop: StopRule,
    pub times: TimeDistribution,
}

impl SimConfig {
    /// Worker count actually used: sequential runs always use one.
    pub fn effective_workers(&self) -> usize {
        match self.mode {
            Mode::Sequential => 1,
            _ => self.workers,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::invalid("need at least one worker"));
        }
        match self.stop {
            StopRule::Horizon(t) if !(t > 0.0 && t.is_finite()) => {
                Err(Error::invalid(format!("horizon must be positive, got {t}")))
            }
            _ => self.times.validated().map(|_| ()),
        }
    }
}

/// What the optimiser saw when it evaluated a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub value: f64,
    pub clean_value: f64,
}

/// The optimisation side of a simulated run.
pub trait Policy {
    /// Choose the point for dispatch `index` (1-based). `completed` holds
    /// every evaluation finished so far, in finish order; `in_flight` holds
    /// the points still running on other workers.
    fn propose(
        &mut self,
        index: usize,
        completed: &[EvaluationRecord],
        in_flight: &InFlightSet,
    ) -> Result<Vec<f64>>;

    /// Evaluate the objective at `point`. Called once per dispatched job; the
    /// result is revealed to [`Policy::propose`] only after the job finishes.
    fn evaluate(&mut self, point: &[f64]) -> Result<Observation>;
}

/// Policy for pure throughput studies: no objective, no model.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullPolicy;

impl Policy for NullPolicy {
    fn propose(&mut self, _: usize, _: &[EvaluationRecord], _: &InFlightSet) -> Result<Vec<f64>> {
        Ok(Vec::new())
    }

    fn evaluate(&mut self, _: &[f64]) -> Result<Observation> {
        Ok(Observation {
            value: 0.0,
            clean_value: 0.0,
        })
    }
}

#[derive(Debug)]
struct Job(EvaluationRecord);

impl Job {
    fn key(&self) -> (f64, usize) {
        (self.0.finish_time, self.0.worker)
    }
}

impl PartialEq for Job {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Job {}

impl PartialOrd for Job {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Job {
    // reversed: BinaryHeap is a max-heap and we want the earliest (time, worker)
    fn cmp(&self, other: &Self) -> Ordering {
        let (ta, wa) = self.key();
        let (tb, wb) = other.key();
        tb.total_cmp(&ta).then(wb.cmp(&wa))
    }
}

struct Loop<'a, P, R: ?Sized> {
    cfg: &'a SimConfig,
    policy: &'a mut P,
    time_rng: &'a mut R,
    completed: Vec<EvaluationRecord>,
    dispatched: usize,
}

impl<P: Policy, R: Rng + ?Sized> Loop<'_, P, R> {
    fn budget_left(&self) -> bool {
        match self.cfg.stop {
            StopRule::Budget(n) => self.dispatched < n,
            StopRule::Horizon(_) => true,
        }
    }

    fn observable(&self, finish: f64) -> bool {
        match self.cfg.stop {
            StopRule::Horizon(t) => finish <= t,
            StopRule::Budget(_) => true,
        }
    }

    fn dispatch(
        &mut self,
        worker: usize,
        now: f64,
        duration: f64,
        in_flight: &InFlightSet,
    ) -> Result<EvaluationRecord> {
        self.dispatched += 1;
        let index = self.dispatched;
        let point = self.policy.propose(index, &self.completed, in_flight)?;
        let obs = self.policy.evaluate(&point)?;
        Ok(EvaluationRecord {
            index,
            worker,
            dispatch_time: now,
            finish_time: now + duration,
            value: obs.value,
            clean_value: obs.clean_value,
            point,
        })
    }

    fn run_asynchronous(&mut self, workers: usize) -> Result<()> {
        let mut queue: BinaryHeap<Job> = BinaryHeap::new();
        let mut freed: Vec<(usize, f64)> = (0..workers).map(|w| (w, 0.0)).collect();
        loop {
            for &(worker, now) in &freed {
                if !self.budget_left() {
                    break;
                }
                let duration = self.cfg.times.sample(self.time_rng);
                if !self.observable(now + duration) {
                    // this worker cannot deliver anything more before the horizon
                    continue;
                }
                let in_flight = InFlightSet::new(queue.iter().map(|j| j.0.point.clone()).collect());
                let rec = self.dispatch(worker, now, duration, &in_flight)?;
                queue.push(Job(rec));
            }
            freed.clear();
            let Some(first) = queue.pop() else {
                return Ok(());
            };
            let now = first.0.finish_time;
            let mut batch = vec![first];
            while queue.peek().is_some_and(|j| j.0.finish_time == now) {
                batch.push(queue.pop().expect("peeked"));
            }
            for Job(rec) in batch {
                freed.push((rec.worker, now));
                self.completed.push(rec);
            }
        }
    }

    fn run_synchronous(&mut self, workers: usize) -> Result<()> {
        let mut now = 0.0;
        loop {
            let mut batch_end = now;
            let mut batch: Vec<EvaluationRecord> = Vec::with_capacity(workers);
            let mut in_flight = InFlightSet::default();
            for worker in 0..workers {
                if !self.budget_left() {
                    break;
                }
                let duration = self.cfg.times.sample(self.time_rng);
                batch_end = f64::max(batch_end, now + duration);
                if !self.observable(now + duration) {
                    continue;
                }
                let rec = self.dispatch(worker, now, duration, &in_flight)?;
                in_flight.push(rec.point.clone());
                batch.push(rec);
            }
            let stalled = batch_end == now;
            batch.sort_by(|a, b| {
                a.finish_time
                    .total_cmp(&b.finish_time)
                    .then(a.worker.cmp(&b.worker))
            });
            self.completed.extend(batch);
            now = batch_end;
            if stalled || !self.budget_left() || !self.observable(now) {
                return Ok(());
            }
        }
    }
}

/// Run one simulated optimisation. Durations come from `time_rng` only, so
/// two policies driven with equal time streams see identical schedules.
pub fn simulate<P: Policy, R: Rng + ?Sized>(
    cfg: &SimConfig,
    policy: &mut P,
    time_rng: &mut R,
) -> Result<Trace> {
    cfg.validate()?;
    let workers = cfg.effective_workers();
    let mut state = Loop {
        cfg,
        policy,
        time_rng,
        completed: Vec::new(),
        dispatched: 0,
    };
    match cfg.mode {
        Mode::Sequential | Mode::Asynchronous => state.run_asynchronous(workers)?,
        Mode::Synchronous => state.run_synchronous(workers)?,
    }
    let mut records = state.completed;
    records.sort_by_key(|r| r.index);
    Ok(Trace {
        records,
        mode: cfg.mode,
        workers,
        stop: cfg.stop,
    })
}

/// Number of evaluations completed within the horizon, without an objective.
pub fn count_evaluations<R: Rng + ?Sized>(cfg: &SimConfig, time_rng: &mut R) -> Result<usize> {
    Ok(simulate(cfg, &mut NullPolicy, time_rng)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(mode: Mode, workers: usize, stop: StopRule, times: TimeDistribution) -> SimConfig {
        SimConfig {
            mode,
            workers,
            stop,
            times,
        }
    }

    #[test]
    fn asynchronous_packing_with_constant_times() {
        let times = TimeDistribution::uniform(1.0, 1.0 + 1e-9).unwrap();
        let c = cfg(Mode::Asynchronous, 4, StopRule::Horizon(10.0), times);
        let n = count_evaluations(&c, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!((36..=40).contains(&n), "{n}");
    }

    #[test]
    fn synchronous_batches_share_dispatch_time() {
        let times = TimeDistribution::uniform(1.0, 1.0 + 1e-9).unwrap();
        let c = cfg(Mode::Synchronous, 4, StopRule::Horizon(10.0), times);
        let t = simulate(&c, &mut NullPolicy, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!((36..=40).contains(&t.len()));
        for chunk in t.records.chunks(4) {
            assert!(chunk
                .iter()
                .all(|r| r.dispatch_time == chunk[0].dispatch_time));
        }
    }

    #[test]
    fn sequential_forces_one_worker() {
        let times = TimeDistribution::exponential(1.0).unwrap();
        let c = cfg(Mode::Sequential, 8, StopRule::Budget(20), times);
        let t = simulate(&c, &mut NullPolicy, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(t.workers, 1);
        assert_eq!(t.len(), 20);
        assert!(t.records.iter().all(|r| r.worker == 0));
        for w in t.records.windows(2) {
            assert_eq!(w[1].dispatch_time, w[0].finish_time);
        }
    }

    #[test]
    fn budget_mode_synchronous_partial_last_batch() {
        let times = TimeDistribution::exponential(1.0).unwrap();
        let c = cfg(Mode::Synchronous, 4, StopRule::Budget(10), times);
        let t = simulate(&c, &mut NullPolicy, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(t.len(), 10);
        let idx: Vec<usize> = t.records.iter().map(|r| r.index).collect();
        assert_eq!(idx, (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn tiny_horizon_gives_empty_trace() {
        let times = TimeDistribution::uniform(1.0, 2.0).unwrap();
        for mode in [Mode::Sequential, Mode::Synchronous, Mode::Asynchronous] {
            let c = cfg(mode, 3, StopRule::Horizon(0.5), times);
            let t = simulate(&c, &mut NullPolicy, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
            assert!(t.is_empty());
        }
    }

    #[test]
    fn rejects_bad_config() {
        let times = TimeDistribution::exponential(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(simulate(
            &cfg(Mode::Asynchronous, 0, StopRule::Budget(3), times),
            &mut NullPolicy,
            &mut rng
        )
        .is_err());
        assert!(simulate(
            &cfg(Mode::Asynchronous, 2, StopRule::Horizon(0.0), times),
            &mut NullPolicy,
            &mut rng
        )
        .is_err());
    }
}
