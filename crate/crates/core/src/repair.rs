//! Local schedule repair: adapt the baseline schedule to a set of events while
//! moving as few operations as possible.
//!
//! The repaired schedule keeps each machine's baseline operation order. Ops
//! whose machine changed, and ops of inserted jobs, are slotted into their
//! machine's sequence at the position giving the earliest start (first
//! position on ties). Timing then runs from time zero over the whole instance:
//! every op starts at its earliest feasible time given its job and machine
//! predecessors and the maintenance windows, and an op that keeps its baseline
//! machine never starts earlier than it did in the baseline. Nothing shifts
//! left, so cancellations and shorter durations leave gaps in place.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{run_processor, DynamicEvent, ProcessorError, Scenario};
use crate::jsp::{validate, Instance, JobLabel, MachineId, OpId, Schedule, Time, Window};
use crate::solver::earliest_feasible_start;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairResult {
    /// Post-event instance.
    pub instance: Instance,
    pub schedule: Schedule,
    pub affected: BTreeSet<OpId>,
    pub makespan: Time,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepairError {
    #[error(transparent)]
    Events(#[from] ProcessorError),
    #[error("baseline schedule is infeasible: {0}")]
    InfeasibleBaseline(String),
    #[error("repaired schedule failed validation: {0}")]
    Internal(String),
}

pub fn local_repair(scenario: &Scenario) -> Result<RepairResult, RepairError> {
    repair(&scenario.baseline, &scenario.baseline_schedule, &scenario.events)
}

/// Operations the repair reschedules.
///
/// Seeds are the ops an event touches directly (changed duration or machine,
/// every op of an inserted job, ops whose baseline interval meets a new
/// window). The closure adds all job successors of a seed that now finishes
/// later than in the baseline, any op whose job or machine predecessor in the
/// repaired order finishes later than it did in the baseline (new ops count as
/// finishing later), and any op whose start moved.
pub fn affected_operations(
    baseline: &Instance,
    baseline_schedule: &Schedule,
    events: &[DynamicEvent],
) -> Result<BTreeSet<OpId>, RepairError> {
    repair(baseline, baseline_schedule, events).map(|r| r.affected)
}

#[derive(Clone, Copy)]
struct Base {
    machine: MachineId,
    start: Time,
    end: Time,
}

struct Ctx<'a> {
    instance: &'a Instance,
    /// Baseline placement of ops that existed before the events.
    base: BTreeMap<OpId, Base>,
}

impl Ctx<'_> {
    /// Baseline start that acts as a floor: only for ops still on their
    /// baseline machine.
    fn floor(&self, id: OpId, machine: MachineId) -> Option<Time> {
        self.base.get(&id).filter(|b| b.machine == machine).map(|b| b.start)
    }
}

fn repair(
    baseline: &Instance,
    baseline_schedule: &Schedule,
    events: &[DynamicEvent],
) -> Result<RepairResult, RepairError> {
    let report = validate(baseline, baseline_schedule);
    if let Some(v) = report.violations.first() {
        return Err(RepairError::InfeasibleBaseline(format!("{}: {}", v.kind, v.detail)));
    }
    let trace = run_processor(baseline, events)?;
    let instance = trace.final_state;

    let fresh_jobs: BTreeSet<JobLabel> = events
        .iter()
        .filter_map(|e| match e {
            DynamicEvent::JobInsertion { job, .. } => Some(*job),
            _ => None,
        })
        .filter(|job| instance.job(*job).is_some())
        .collect();

    let mut base = BTreeMap::new();
    for (id, _) in instance.operations() {
        if fresh_jobs.contains(&id.job) {
            continue;
        }
        if let (Some(op), Some(start)) = (baseline.operation(id), baseline_schedule.start(id)) {
            base.insert(
                id,
                Base {
                    machine: op.machine,
                    start,
                    end: start + op.duration,
                },
            );
        }
    }
    let ctx = Ctx {
        instance: &instance,
        base,
    };

    // Baseline order on each machine, restricted to ops that stayed put.
    let mut sequences: Vec<Vec<OpId>> = vec![Vec::new(); instance.machine_count()];
    let mut kept: Vec<(MachineId, Time, OpId)> = instance
        .operations()
        .filter_map(|(id, op)| ctx.floor(id, op.machine).map(|s| (op.machine, s, id)))
        .collect();
    kept.sort();
    for (m, _, id) in kept {
        sequences[m].push(id);
    }

    for id in placement_order(&instance, events, &ctx) {
        let machine = instance.operation(id).expect("op exists").machine;
        let mut best: Option<(Time, usize)> = None;
        for pos in 0..=sequences[machine].len() {
            sequences[machine].insert(pos, id);
            if let Some(timing) = time_sequences(&ctx, &sequences) {
                let start = timing.start[&id];
                if best.is_none_or(|(s, _)| start < s) {
                    best = Some((start, pos));
                }
            }
            sequences[machine].remove(pos);
        }
        let (_, pos) = best.expect("an acyclic insertion position always exists");
        sequences[machine].insert(pos, id);
    }

    let timing = time_sequences(&ctx, &sequences).expect("repaired sequences are acyclic");
    let affected = closure(&ctx, events, &timing);
    let schedule: Schedule = timing.start.iter().map(|(&id, &s)| (id, s)).collect();
    let report = validate(&instance, &schedule);
    if let Some(v) = report.violations.first() {
        return Err(RepairError::Internal(format!("{}: {}", v.kind, v.detail)));
    }
    let makespan = timing.end.values().copied().max().unwrap_or(0);
    Ok(RepairResult {
        instance,
        schedule,
        affected,
        makespan,
    })
}

/// Ops missing from the kept sequences, in the order their events appear.
fn placement_order(instance: &Instance, events: &[DynamicEvent], ctx: &Ctx) -> Vec<OpId> {
    let needs_slot = |id: OpId| {
        instance
            .operation(id)
            .is_some_and(|op| ctx.floor(id, op.machine).is_none())
    };
    let mut order = Vec::new();
    let mut listed = BTreeSet::new();
    let mut push = |id: OpId, order: &mut Vec<OpId>| {
        if needs_slot(id) && listed.insert(id) {
            order.push(id);
        }
    };
    for event in events {
        match event {
            DynamicEvent::MachineChange { job, op, .. } => push(OpId::new(*job, *op), &mut order),
            DynamicEvent::JobInsertion { job, .. } => {
                if let Some(ops) = instance.job(*job) {
                    for k in 0..ops.len() {
                        push(OpId::new(*job, k), &mut order);
                    }
                }
            }
            _ => {}
        }
    }
    for (id, _) in instance.operations() {
        push(id, &mut order);
    }
    order
}

struct Timing {
    start: BTreeMap<OpId, Time>,
    end: BTreeMap<OpId, Time>,
    /// Topological order used for the pass.
    order: Vec<OpId>,
    job_pred: BTreeMap<OpId, OpId>,
    machine_pred: BTreeMap<OpId, OpId>,
}

/// Time every op present in `sequences`; `None` if the precedence graph has a
/// cycle. Job predecessors skip ops not yet placed.
fn time_sequences(ctx: &Ctx, sequences: &[Vec<OpId>]) -> Option<Timing> {
    let placed: BTreeSet<OpId> = sequences.iter().flatten().copied().collect();
    let mut job_pred = BTreeMap::new();
    let mut machine_pred = BTreeMap::new();
    let mut succs: BTreeMap<OpId, Vec<OpId>> = BTreeMap::new();
    let mut indegree: BTreeMap<OpId, usize> = placed.iter().map(|&id| (id, 0)).collect();

    let mut last_in_job: Option<OpId> = None;
    for &id in &placed {
        if let Some(prev) = last_in_job.filter(|p| p.job == id.job) {
            job_pred.insert(id, prev);
            succs.entry(prev).or_default().push(id);
            *indegree.get_mut(&id).expect("placed") += 1;
        }
        last_in_job = Some(id);
    }
    for seq in sequences {
        for pair in seq.windows(2) {
            machine_pred.insert(pair[1], pair[0]);
            succs.entry(pair[0]).or_default().push(pair[1]);
            *indegree.get_mut(&pair[1]).expect("placed") += 1;
        }
    }

    let mut ready: BTreeSet<OpId> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&id, _)| id).collect();
    let mut start = BTreeMap::new();
    let mut end = BTreeMap::new();
    let mut order = Vec::with_capacity(placed.len());
    while let Some(id) = ready.pop_first() {
        let op = ctx.instance.operation(id).expect("placed op exists");
        let job_ready = job_pred.get(&id).map_or(0, |p| end[p]);
        let mut machine_ready = machine_pred.get(&id).map_or(0, |p| end[p]);
        if let Some(floor) = ctx.floor(id, op.machine) {
            machine_ready = machine_ready.max(floor);
        }
        let s = earliest_feasible_start(machine_ready, job_ready, op.duration, ctx.instance.windows(op.machine));
        start.insert(id, s);
        end.insert(id, s + op.duration);
        order.push(id);
        for &next in succs.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indegree.get_mut(&next).expect("placed");
            *d -= 1;
            if *d == 0 {
                ready.insert(next);
            }
        }
    }
    (order.len() == placed.len()).then_some(Timing {
        start,
        end,
        order,
        job_pred,
        machine_pred,
    })
}

fn closure(ctx: &Ctx, events: &[DynamicEvent], timing: &Timing) -> BTreeSet<OpId> {
    let instance = ctx.instance;
    let new_windows: Vec<(MachineId, Window)> = events
        .iter()
        .filter_map(|e| match e {
            DynamicEvent::MachineMaintenance { machine, window } => Some((*machine, *window)),
            _ => None,
        })
        .collect();

    let mut seed: BTreeSet<OpId> = BTreeSet::new();
    for event in events {
        match *event {
            DynamicEvent::ProcessingTimeChange {
                job,
                op,
                old_pt,
                new_pt,
            } if old_pt != new_pt => {
                seed.insert(OpId::new(job, op));
            }
            DynamicEvent::MachineChange {
                job,
                op,
                old_machine,
                new_machine,
            } if old_machine != new_machine => {
                seed.insert(OpId::new(job, op));
            }
            _ => {}
        }
    }
    for (id, _) in instance.operations() {
        match ctx.base.get(&id) {
            None => {
                seed.insert(id);
            }
            Some(b) => {
                if new_windows
                    .iter()
                    .any(|(m, w)| *m == b.machine && w.overlaps(b.start, b.end - b.start))
                {
                    seed.insert(id);
                }
            }
        }
    }
    seed.retain(|id| instance.operation(*id).is_some());

    let later = |id: OpId| match ctx.base.get(&id) {
        None => true,
        Some(b) => timing.end[&id] > b.end,
    };

    let mut affected = BTreeSet::new();
    let mut chain: BTreeSet<OpId> = BTreeSet::new();
    for &id in &timing.order {
        let jp = timing.job_pred.get(&id).copied();
        let mp = timing.machine_pred.get(&id).copied();
        let moved = ctx.base.get(&id).is_none_or(|b| b.start != timing.start[&id]);
        let hit =
            seed.contains(&id) || moved || jp.is_some_and(|p| chain.contains(&p) || later(p)) || mp.is_some_and(later);
        if hit {
            affected.insert(id);
        }
        if (seed.contains(&id) && later(id)) || jp.is_some_and(|p| chain.contains(&p)) {
            chain.insert(id);
        }
    }
    affected
}
