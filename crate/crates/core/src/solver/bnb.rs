use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::jsp::{Instance, Time};

use super::dense::{Dense, Partial};
use super::dispatch::{run_dispatch, DispatchRule};
use super::{SolveResult, SolveStatus};

const CLOCK_CHECK_INTERVAL: u64 = 256;

/// Exact makespan minimization by depth-first branch-and-bound over active
/// schedules.
///
/// Each node branches on the Giffler–Thompson conflict set, children in
/// `(job label, op index)` order. Nodes are pruned against a bound combining
/// remaining job work with a preemptive one-machine relaxation per machine
/// (windows ignored, which only loosens it). The incumbent starts as the best
/// dispatch schedule and is replaced only on strict improvement, so the result
/// is deterministic for a fixed instance.
///
/// When `time_limit` expires the best incumbent is returned with status
/// [`SolveStatus::Feasible`].
pub fn solve_exact(instance: &Instance, time_limit: Duration) -> SolveResult {
    let started = Instant::now();
    let d = Dense::new(instance);

    let mut best_starts = Vec::new();
    let mut best = Time::MAX;
    for rule in [DispatchRule::Mwr, DispatchRule::Spt, DispatchRule::Fifo] {
        let p = run_dispatch(&d, rule);
        if p.makespan() < best {
            best = p.makespan();
            best_starts = p.starts;
        }
    }

    let mut search = Search {
        d: &d,
        best,
        best_starts,
        nodes: 0,
        deadline: started + time_limit,
        timed_out: false,
    };
    let root = Partial::new(&d);
    if bound(&d, &root) < search.best {
        search.dfs(root);
    }

    let status = if search.timed_out {
        SolveStatus::Feasible
    } else {
        SolveStatus::Optimal
    };
    SolveResult {
        schedule: d.schedule(&search.best_starts),
        makespan: if d.len() == 0 { 0 } else { search.best },
        status,
        nodes_explored: search.nodes,
        elapsed: started.elapsed(),
    }
}

struct Search<'a> {
    d: &'a Dense,
    best: Time,
    best_starts: Vec<Time>,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
}

impl Search<'_> {
    fn dfs(&mut self, node: Partial) {
        self.nodes += 1;
        if self.nodes.is_multiple_of(CLOCK_CHECK_INTERVAL) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        if self.timed_out {
            return;
        }
        if node.done(self.d) {
            let mk = node.makespan();
            if mk < self.best {
                self.best = mk;
                self.best_starts = node.starts;
            }
            return;
        }
        for c in node.conflict_set(self.d) {
            let mut child = node.clone();
            child.place(self.d, c);
            if bound(self.d, &child) < self.best {
                self.dfs(child);
                if self.timed_out {
                    return;
                }
            }
        }
    }
}

struct Pending {
    release: Time,
    duration: Time,
    tail: Time,
}

/// Lower bound on the makespan of any completion of `p`.
fn bound(d: &Dense, p: &Partial) -> Time {
    let mut lb = 0;
    let mut per_machine: Vec<Vec<Pending>> = (0..d.machine_count).map(|_| Vec::new()).collect();
    for (j, ops) in d.job_ops.iter().enumerate() {
        let mut head = p.job_ready[j];
        for &o in &ops[p.next[j]..] {
            let m = d.machine[o];
            per_machine[m].push(Pending {
                release: head.max(p.machine_ready[m]),
                duration: d.duration[o],
                tail: d.tail[o],
            });
            head += d.duration[o];
        }
        lb = lb.max(head);
    }
    for pending in &mut per_machine {
        lb = lb.max(preemptive_one_machine(pending));
    }
    lb
}

/// Max of `completion + tail` under Jackson's preemptive schedule (largest
/// tail first among released jobs), a valid bound for the non-preemptive
/// one-machine problem with heads and tails.
fn preemptive_one_machine(jobs: &mut [Pending]) -> Time {
    if jobs.is_empty() {
        return 0;
    }
    jobs.sort_by_key(|j| j.release);
    let mut heap: BinaryHeap<(Time, usize)> = BinaryHeap::new();
    let mut remaining: Vec<Time> = jobs.iter().map(|j| j.duration).collect();
    let mut t = jobs[0].release;
    let mut i = 0;
    let mut result = 0;
    while i < jobs.len() || !heap.is_empty() {
        if heap.is_empty() && t < jobs[i].release {
            t = jobs[i].release;
        }
        while i < jobs.len() && jobs[i].release <= t {
            heap.push((jobs[i].tail, i));
            i += 1;
        }
        let (tail, k) = heap.pop().expect("released job available");
        let next_release = jobs.get(i).map_or(Time::MAX, |j| j.release);
        let run = remaining[k].min(next_release - t);
        t += run;
        remaining[k] -= run;
        if remaining[k] == 0 {
            result = result.max(t + tail);
        } else {
            heap.push((tail, k));
        }
    }
    result
}
