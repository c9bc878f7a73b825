use crate::jsp::{Instance, OpId, Schedule, Time, Window};

use super::earliest_feasible_start;

/// Flat, index-based view of an instance for the search routines.
///
/// Jobs are numbered in label order, so job index order is label order.
pub(super) struct Dense {
    pub ids: Vec<OpId>,
    pub job_ops: Vec<Vec<usize>>,
    pub machine: Vec<usize>,
    pub duration: Vec<Time>,
    /// Work remaining in the job after this operation.
    pub tail: Vec<Time>,
    pub windows: Vec<Vec<Window>>,
    pub machine_count: usize,
}

impl Dense {
    pub fn new(instance: &Instance) -> Self {
        let mut d = Dense {
            ids: Vec::new(),
            job_ops: Vec::new(),
            machine: Vec::new(),
            duration: Vec::new(),
            tail: Vec::new(),
            windows: (0..instance.machine_count())
                .map(|m| instance.windows(m).to_vec())
                .collect(),
            machine_count: instance.machine_count(),
        };
        for (&job, ops) in instance.jobs() {
            let mut flat = Vec::with_capacity(ops.len());
            let mut remaining: Time = ops.iter().map(|o| o.duration).sum();
            for (k, op) in ops.iter().enumerate() {
                flat.push(d.ids.len());
                d.ids.push(OpId::new(job, k));
                d.machine.push(op.machine);
                d.duration.push(op.duration);
                remaining -= op.duration;
                d.tail.push(remaining);
            }
            d.job_ops.push(flat);
        }
        d
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn schedule(&self, starts: &[Time]) -> Schedule {
        self.ids.iter().copied().zip(starts.iter().copied()).collect()
    }
}

/// Partial schedule built by appending operations (Giffler–Thompson style).
#[derive(Clone)]
pub(super) struct Partial {
    pub next: Vec<usize>,
    pub job_ready: Vec<Time>,
    pub machine_ready: Vec<Time>,
    pub starts: Vec<Time>,
    pub scheduled: usize,
}

#[derive(Clone, Copy, Debug)]
pub(super) struct Candidate {
    pub job: usize,
    pub op: usize,
    pub start: Time,
    pub end: Time,
}

impl Partial {
    pub fn new(d: &Dense) -> Self {
        Partial {
            next: vec![0; d.job_ops.len()],
            job_ready: vec![0; d.job_ops.len()],
            machine_ready: vec![0; d.machine_count],
            starts: vec![0; d.len()],
            scheduled: 0,
        }
    }

    pub fn done(&self, d: &Dense) -> bool {
        self.scheduled == d.len()
    }

    pub fn makespan(&self) -> Time {
        self.job_ready.iter().copied().max().unwrap_or(0)
    }

    /// Next operation of every unfinished job with its earliest start.
    pub fn candidates(&self, d: &Dense) -> Vec<Candidate> {
        let mut out = Vec::with_capacity(d.job_ops.len());
        for (j, ops) in d.job_ops.iter().enumerate() {
            if let Some(&o) = ops.get(self.next[j]) {
                let m = d.machine[o];
                let start =
                    earliest_feasible_start(self.machine_ready[m], self.job_ready[j], d.duration[o], &d.windows[m]);
                out.push(Candidate {
                    job: j,
                    op: o,
                    start,
                    end: start + d.duration[o],
                });
            }
        }
        out
    }

    /// Giffler–Thompson conflict set: candidates on the machine of the
    /// earliest-completing candidate that could start before it completes.
    ///
    /// Ties on completion go to the lower machine index, then lower job.
    /// The result is in job order.
    pub fn conflict_set(&self, d: &Dense) -> Vec<Candidate> {
        let cands = self.candidates(d);
        let Some(pivot) = cands.iter().min_by_key(|c| (c.end, d.machine[c.op], c.job)).copied() else {
            return Vec::new();
        };
        let m = d.machine[pivot.op];
        cands
            .into_iter()
            .filter(|c| d.machine[c.op] == m && c.start < pivot.end)
            .collect()
    }

    pub fn place(&mut self, d: &Dense, c: Candidate) {
        let m = d.machine[c.op];
        self.starts[c.op] = c.start;
        self.job_ready[c.job] = c.end;
        self.machine_ready[m] = c.end;
        self.next[c.job] += 1;
        self.scheduled += 1;
    }
}
