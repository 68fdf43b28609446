//! Discrete-event simulation of sequential, synchronous and asynchronous
//! parallel evaluation under random evaluation times.

mod scheduler;
mod time;
mod trace;

pub use scheduler::{count_evaluations, simulate, NullPolicy, Observation, Policy, SimConfig};
pub use time::TimeDistribution;
pub use trace::{EvaluationRecord, Mode, StopRule, Trace};

pub(crate) use trace::fmt_f64;
