//! Solvers for fair repetitive single-machine scheduling: `n` clients each
//! submit one job per day for `m` days, and the goal is to choose the daily
//! processing orders so that the largest total completion time of any client
//! is minimized.
//!
//! * [`approx2`]: LP relaxation with a prefix-set separation oracle and
//!   sort-based rounding (factor 2, day-dependent).
//! * [`ptas`]: batching enumeration plus a configuration DP.
//! * [`dayinv`]: two-day inversion for day-invariant instances.
//! * [`qptas`]: day reduction, configuration LP and randomized rounding for
//!   day-invariant instances.
//! * [`exact`]: branch and bound, used as the ground-truth oracle.

#![allow(clippy::needless_range_loop)]

pub mod approx2;
pub mod batching;
pub mod dayinv;
pub mod error;
pub mod exact;
pub mod lp;
pub mod model;
pub mod ptas;
pub mod qptas;
pub mod ratio;

pub use error::{Error, Result};
pub use model::{evaluate_schedule, Evaluation, Instance, Schedule, Time};
