//! Makespan minimization: exact branch-and-bound, dispatch-rule heuristics and
//! a brute-force enumeration oracle for small instances.
//!
//! Maintenance windows are handled entirely by the timing routine
//! [`earliest_feasible_start`]; operations are never preempted.

mod bnb;
mod brute;
mod dense;
mod dispatch;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::jsp::{Instance, Schedule, Time, Window};

pub use bnb::solve_exact;
pub use brute::{brute_force_optimum, brute_force_optimum_with_cap, BruteForceError, DEFAULT_BRUTE_FORCE_CAP};
pub use dispatch::{solve_dispatch, DispatchRule};

/// Environment variable overriding [`DEFAULT_TIME_LIMIT`], in whole seconds.
pub const TIME_LIMIT_ENV: &str = "DJSP_TIME_LIMIT_SECS";

pub const DEFAULT_TIME_LIMIT: Duration = Duration::from_secs(60);

/// [`DEFAULT_TIME_LIMIT`] unless [`TIME_LIMIT_ENV`] holds a valid number of seconds.
pub fn default_time_limit() -> Duration {
    std::env::var(TIME_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(Duration::from_secs)
        .unwrap_or(DEFAULT_TIME_LIMIT)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// Search completed; the makespan is minimal.
    Optimal,
    /// A schedule is available but optimality was not proven.
    Feasible,
    /// No schedule was produced.
    Infeasible,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub schedule: Schedule,
    pub makespan: Time,
    pub status: SolveStatus,
    pub nodes_explored: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Smallest `t >= max(machine_ready, job_ready)` such that `[t, t + duration)`
/// misses every window.
///
/// `windows` must be sorted by start and pairwise disjoint, which makes one
/// forward pass sufficient: once `t` is pushed past a window, no earlier window
/// can overlap again.
pub fn earliest_feasible_start(machine_ready: Time, job_ready: Time, duration: Time, windows: &[Window]) -> Time {
    let mut t = machine_ready.max(job_ready);
    for w in windows {
        if w.start >= t + duration {
            break;
        }
        if w.overlaps(t, duration) {
            t = w.end;
        }
    }
    t
}

/// Larger of the heaviest machine load and the longest job.
pub fn lower_bound(instance: &Instance) -> Time {
    let mut load = vec![0; instance.machine_count()];
    let mut longest_job = 0;
    for ops in instance.jobs().values() {
        let mut total = 0;
        for op in ops {
            load[op.machine] += op.duration;
            total += op.duration;
        }
        longest_job = longest_job.max(total);
    }
    load.into_iter().max().unwrap_or(0).max(longest_job)
}
