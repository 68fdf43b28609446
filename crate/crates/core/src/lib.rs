#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod benchmarks;
mod error;
pub mod gp;
pub mod harness;
mod linalg;
pub mod metrics;
pub mod optimizer;
pub mod qmc;
pub mod sim;
pub mod theory;

pub use error::{Error, Result};
