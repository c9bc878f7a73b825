use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::jsp::Instance;

use super::dense::{Candidate, Dense, Partial};
use super::{SolveResult, SolveStatus};

/// Priority rule applied inside each Giffler–Thompson conflict set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispatchRule {
    /// Shortest processing time.
    Spt,
    /// Job that has been waiting longest (earliest job-ready time).
    Fifo,
    /// Most work remaining in the job, this operation included.
    Mwr,
}

impl fmt::Display for DispatchRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DispatchRule::Spt => "spt",
            DispatchRule::Fifo => "fifo",
            DispatchRule::Mwr => "mwr",
        })
    }
}

impl FromStr for DispatchRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spt" => Ok(DispatchRule::Spt),
            "fifo" => Ok(DispatchRule::Fifo),
            "mwr" => Ok(DispatchRule::Mwr),
            other => Err(format!("unknown dispatch rule '{other}' (expected spt, fifo or mwr)")),
        }
    }
}

/// Active-schedule construction driven by `rule`; ties go to the lowest job label.
pub fn solve_dispatch(instance: &Instance, rule: DispatchRule) -> SolveResult {
    let started = Instant::now();
    let d = Dense::new(instance);
    let p = run_dispatch(&d, rule);
    SolveResult {
        schedule: d.schedule(&p.starts),
        makespan: p.makespan(),
        status: SolveStatus::Feasible,
        nodes_explored: p.scheduled as u64,
        elapsed: started.elapsed(),
    }
}

pub(super) fn run_dispatch(d: &Dense, rule: DispatchRule) -> Partial {
    let mut p = Partial::new(d);
    while !p.done(d) {
        let conflict = p.conflict_set(d);
        let pick = pick(d, &p, &conflict, rule);
        p.place(d, pick);
    }
    p
}

fn pick(d: &Dense, p: &Partial, conflict: &[Candidate], rule: DispatchRule) -> Candidate {
    // Conflict sets are in job order, so min_by_key keeps the lowest label on ties.
    let chosen = match rule {
        DispatchRule::Spt => conflict.iter().min_by_key(|c| d.duration[c.op]),
        DispatchRule::Fifo => conflict.iter().min_by_key(|c| p.job_ready[c.job]),
        DispatchRule::Mwr => conflict
            .iter()
            .min_by_key(|c| std::cmp::Reverse(d.duration[c.op] + d.tail[c.op])),
    };
    *chosen.expect("conflict set is never empty while operations remain")
}
