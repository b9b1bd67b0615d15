//! Generic Nash-Moser iteration.
//!
//! The schedule fixes `theta_k = theta0^(r^k)` from the loss orders of the
//! problem; each step solves the linearized problem around the current iterate
//! and adds the smoothed correction. The trace logs the E-scale norms of the
//! iterates and corrections so that the three induction properties can be
//! checked after the fact.

mod problem;
mod schedule;
mod solve;
mod trace;

pub use problem::Problem;
pub use schedule::{compute_schedule, loss_delta, p_min, ScheduleParams};
pub use solve::{
    corrective_step, energy_norm, initial_iterate, nash_moser_solve, nash_moser_solve_with_retry, picard_solve,
    residual, Residual, SolveOptions, Step,
};
pub use trace::{check_induction, properties, InductionReport, IterationRecord, IterationTrace, TRACE_COLUMNS};

#[cfg(test)]
mod toy;
