//! Core job-shop domain types, completion times, makespan and the schedule
//! validator.
//!
//! Time is integer-valued. Busy intervals and maintenance windows are both
//! half-open, so an operation may end exactly when a window opens.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Abstract integer time unit.
pub type Time = i64;

/// Positive job label, rendered as `J{label}`.
pub type JobLabel = u32;

/// 0-based machine index, rendered as `M{index}`.
pub type MachineId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JspError {
    #[error("job label must be positive")]
    ZeroJobLabel,
    #[error("job {0} has no operations")]
    EmptyJob(JobLabel),
    #[error("{op} has duration {duration}; durations must be >= 1")]
    NonPositiveDuration { op: OpId, duration: Time },
    #[error("{op} uses machine M{machine} but the instance has {machine_count} machines")]
    MachineOutOfRange {
        op: OpId,
        machine: MachineId,
        machine_count: usize,
    },
    #[error("maintenance window on M{machine} but the instance has {machine_count} machines")]
    WindowMachineOutOfRange { machine: MachineId, machine_count: usize },
    #[error("invalid maintenance window [{start}, {end}): need 0 <= start < end")]
    InvalidWindow { start: Time, end: Time },
    #[error("schedule has no start for {0}")]
    MissingStart(OpId),
    #[error("schedule has a start for {0}, which is not an operation of the instance")]
    ExtraStart(OpId),
}

/// One processing step: a machine and a positive processing time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Operation {
    pub machine: MachineId,
    pub duration: Time,
}

impl Operation {
    pub fn new(machine: MachineId, duration: Time) -> Self {
        Self { machine, duration }
    }
}

/// Machine unavailability interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Window {
    pub start: Time,
    pub end: Time,
}

impl Window {
    pub fn new(start: Time, end: Time) -> Result<Self, JspError> {
        if start < 0 || start >= end {
            return Err(JspError::InvalidWindow { start, end });
        }
        Ok(Self { start, end })
    }

    /// Half-open intersection test against `[start, start + duration)`.
    pub fn overlaps(&self, start: Time, duration: Time) -> bool {
        start < self.end && self.start < start + duration
    }
}

/// Identifies an operation: job label plus 0-based position within the job.
///
/// Ordered by `(job, op)`, which is the canonical iteration order everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OpId {
    pub job: JobLabel,
    pub op: usize,
}

impl OpId {
    pub fn new(job: JobLabel, op: usize) -> Self {
        Self { job, op }
    }
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "J{}.O{}", self.job, self.op + 1)
    }
}

/// A job-shop instance with optional maintenance windows.
///
/// Construction validates every structural invariant and normalizes each
/// machine's window list (sorted by start, overlapping windows merged).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct Instance {
    jobs: BTreeMap<JobLabel, Vec<Operation>>,
    machine_count: usize,
    maintenance: BTreeMap<MachineId, Vec<Window>>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    machine_count: usize,
    jobs: BTreeMap<JobLabel, Vec<Operation>>,
    #[serde(default)]
    maintenance: BTreeMap<MachineId, Vec<Window>>,
}

impl TryFrom<InstanceRepr> for Instance {
    type Error = JspError;

    fn try_from(repr: InstanceRepr) -> Result<Self, Self::Error> {
        Instance::new(repr.machine_count, repr.jobs, repr.maintenance)
    }
}

impl From<Instance> for InstanceRepr {
    fn from(instance: Instance) -> Self {
        InstanceRepr {
            machine_count: instance.machine_count,
            jobs: instance.jobs,
            maintenance: instance.maintenance,
        }
    }
}

impl Instance {
    pub fn new(
        machine_count: usize,
        jobs: BTreeMap<JobLabel, Vec<Operation>>,
        maintenance: BTreeMap<MachineId, Vec<Window>>,
    ) -> Result<Self, JspError> {
        for (&job, ops) in &jobs {
            if job == 0 {
                return Err(JspError::ZeroJobLabel);
            }
            if ops.is_empty() {
                return Err(JspError::EmptyJob(job));
            }
            for (k, op) in ops.iter().enumerate() {
                let id = OpId::new(job, k);
                if op.duration < 1 {
                    return Err(JspError::NonPositiveDuration {
                        op: id,
                        duration: op.duration,
                    });
                }
                if op.machine >= machine_count {
                    return Err(JspError::MachineOutOfRange {
                        op: id,
                        machine: op.machine,
                        machine_count,
                    });
                }
            }
        }
        let mut normalized = BTreeMap::new();
        for (machine, windows) in maintenance {
            if machine >= machine_count {
                return Err(JspError::WindowMachineOutOfRange { machine, machine_count });
            }
            for w in &windows {
                Window::new(w.start, w.end)?;
            }
            let merged = merge_windows(windows);
            if !merged.is_empty() {
                normalized.insert(machine, merged);
            }
        }
        Ok(Self {
            jobs,
            machine_count,
            maintenance: normalized,
        })
    }

    /// Jobs given as `(label, ops)` pairs, no maintenance.
    pub fn from_jobs<I>(machine_count: usize, jobs: I) -> Result<Self, JspError>
    where
        I: IntoIterator<Item = (JobLabel, Vec<Operation>)>,
    {
        Self::new(machine_count, jobs.into_iter().collect(), BTreeMap::new())
    }

    pub fn empty() -> Self {
        Self {
            jobs: BTreeMap::new(),
            machine_count: 0,
            maintenance: BTreeMap::new(),
        }
    }

    pub fn jobs(&self) -> &BTreeMap<JobLabel, Vec<Operation>> {
        &self.jobs
    }

    pub fn job(&self, label: JobLabel) -> Option<&[Operation]> {
        self.jobs.get(&label).map(Vec::as_slice)
    }

    pub fn operation(&self, id: OpId) -> Option<&Operation> {
        self.jobs.get(&id.job).and_then(|ops| ops.get(id.op))
    }

    pub fn machine_count(&self) -> usize {
        self.machine_count
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn operation_count(&self) -> usize {
        self.jobs.values().map(Vec::len).sum()
    }

    pub fn maintenance(&self) -> &BTreeMap<MachineId, Vec<Window>> {
        &self.maintenance
    }

    /// Windows of `machine`, sorted and pairwise disjoint.
    pub fn windows(&self, machine: MachineId) -> &[Window] {
        self.maintenance.get(&machine).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All operations in `(job, op)` order.
    pub fn operations(&self) -> impl Iterator<Item = (OpId, &Operation)> + '_ {
        self.jobs
            .iter()
            .flat_map(|(&job, ops)| ops.iter().enumerate().map(move |(k, op)| (OpId::new(job, k), op)))
    }

    pub fn max_job_label(&self) -> Option<JobLabel> {
        self.jobs.keys().next_back().copied()
    }

    /// Same jobs and maintenance; `machine_count` is ignored.
    ///
    /// Text forms do not carry the machine count, so a parsed instance may
    /// report fewer machines than the one it was rendered from.
    pub fn same_tasks(&self, other: &Instance) -> bool {
        self.jobs == other.jobs && self.maintenance == other.maintenance
    }

    pub(crate) fn jobs_mut(&mut self) -> &mut BTreeMap<JobLabel, Vec<Operation>> {
        &mut self.jobs
    }

    pub(crate) fn add_window(&mut self, machine: MachineId, window: Window) {
        let mut windows = self.maintenance.remove(&machine).unwrap_or_default();
        windows.push(window);
        self.maintenance.insert(machine, merge_windows(windows));
    }
}

/// Sort by start and merge windows that overlap (touching windows stay apart).
fn merge_windows(mut windows: Vec<Window>) -> Vec<Window> {
    windows.sort();
    let mut merged: Vec<Window> = Vec::with_capacity(windows.len());
    for w in windows {
        match merged.last_mut() {
            Some(last) if w.start < last.end => last.end = last.end.max(w.end),
            _ => merged.push(w),
        }
    }
    merged
}

/// Start time for each operation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<ScheduledStart>", into = "Vec<ScheduledStart>")]
pub struct Schedule {
    starts: BTreeMap<OpId, Time>,
}

#[derive(Serialize, Deserialize)]
struct ScheduledStart {
    job: JobLabel,
    op: usize,
    start: Time,
}

impl From<Vec<ScheduledStart>> for Schedule {
    fn from(v: Vec<ScheduledStart>) -> Self {
        v.into_iter().map(|s| (OpId::new(s.job, s.op), s.start)).collect()
    }
}

impl From<Schedule> for Vec<ScheduledStart> {
    fn from(s: Schedule) -> Self {
        s.starts
            .into_iter()
            .map(|(id, start)| ScheduledStart {
                job: id.job,
                op: id.op,
                start,
            })
            .collect()
    }
}

impl FromIterator<(OpId, Time)> for Schedule {
    fn from_iter<T: IntoIterator<Item = (OpId, Time)>>(iter: T) -> Self {
        Self {
            starts: iter.into_iter().collect(),
        }
    }
}

impl Schedule {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, op: OpId, start: Time) -> Option<Time> {
        self.starts.insert(op, start)
    }

    pub fn remove(&mut self, op: OpId) -> Option<Time> {
        self.starts.remove(&op)
    }

    pub fn start(&self, op: OpId) -> Option<Time> {
        self.starts.get(&op).copied()
    }

    pub fn starts(&self) -> &BTreeMap<OpId, Time> {
        &self.starts
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (OpId, Time)> + '_ {
        self.starts.iter().map(|(&id, &s)| (id, s))
    }
}

/// End time of every operation.
pub fn completion_times(instance: &Instance, schedule: &Schedule) -> Result<BTreeMap<OpId, Time>, JspError> {
    if let Some((&extra, _)) = schedule
        .starts
        .iter()
        .find(|(id, _)| instance.operation(**id).is_none())
    {
        return Err(JspError::ExtraStart(extra));
    }
    instance
        .operations()
        .map(|(id, op)| {
            schedule
                .start(id)
                .map(|s| (id, s + op.duration))
                .ok_or(JspError::MissingStart(id))
        })
        .collect()
}

pub fn makespan(instance: &Instance, schedule: &Schedule) -> Result<Time, JspError> {
    Ok(completion_times(instance, schedule)?
        .values()
        .copied()
        .max()
        .unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Precedence,
    Overlap,
    Maintenance,
    MissingOp,
    ExtraOp,
    NegativeStart,
    /// A listed operation disagrees with the instance on machine or duration.
    WrongDomain,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Precedence => "precedence",
            ViolationKind::Overlap => "overlap",
            ViolationKind::Maintenance => "maintenance",
            ViolationKind::MissingOp => "missing_op",
            ViolationKind::ExtraOp => "extra_op",
            ViolationKind::NegativeStart => "negative_start",
            ViolationKind::WrongDomain => "wrong_domain",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

/// Check a candidate schedule against every hard constraint.
///
/// Never fails: malformed schedules produce violations. Report order is
/// coverage, negative starts, precedence, machine overlap, maintenance, each
/// in `(job, op)` or machine order.
pub fn validate(instance: &Instance, schedule: &Schedule) -> ValidationReport {
    let mut report = ValidationReport::default();

    for (id, _) in instance.operations() {
        if schedule.start(id).is_none() {
            report.push(ViolationKind::MissingOp, format!("{id} has no start time"));
        }
    }
    for (id, _) in schedule.iter() {
        if instance.operation(id).is_none() {
            report.push(
                ViolationKind::ExtraOp,
                format!("{id} is scheduled but is not an operation of the instance"),
            );
        }
    }

    // Only operations present in both take part in the timing checks.
    let timed: Vec<(OpId, Operation, Time)> = instance
        .operations()
        .filter_map(|(id, op)| schedule.start(id).map(|s| (id, *op, s)))
        .collect();

    for &(id, _, s) in &timed {
        if s < 0 {
            report.push(
                ViolationKind::NegativeStart,
                format!("{id} starts at {s}, before time 0"),
            );
        }
    }

    for (&job, ops) in instance.jobs() {
        for k in 1..ops.len() {
            let prev = OpId::new(job, k - 1);
            let cur = OpId::new(job, k);
            if let (Some(ps), Some(cs)) = (schedule.start(prev), schedule.start(cur)) {
                let prev_end = ps + ops[k - 1].duration;
                if cs < prev_end {
                    report.push(
                        ViolationKind::Precedence,
                        format!("{cur} starts at {cs} but {prev} ends at {prev_end}"),
                    );
                }
            }
        }
    }

    let mut by_machine: BTreeMap<MachineId, Vec<(Time, OpId, Time)>> = BTreeMap::new();
    for &(id, op, s) in &timed {
        by_machine.entry(op.machine).or_default().push((s, id, s + op.duration));
    }
    for (machine, busy) in &mut by_machine {
        busy.sort();
        for i in 0..busy.len() {
            for j in i + 1..busy.len() {
                let (s1, a, e1) = busy[i];
                let (s2, b, e2) = busy[j];
                if s2 >= e1 {
                    break;
                }
                report.push(
                    ViolationKind::Overlap,
                    format!("{a} [{s1}, {e1}) and {b} [{s2}, {e2}) overlap on M{machine}"),
                );
            }
        }
    }

    for (machine, busy) in &by_machine {
        for w in instance.windows(*machine) {
            for &(s, id, e) in busy {
                if w.overlaps(s, e - s) {
                    report.push(
                        ViolationKind::Maintenance,
                        format!(
                            "{id} [{s}, {e}) overlaps maintenance [{}, {}) on M{machine}",
                            w.start, w.end
                        ),
                    );
                }
            }
        }
    }

    report
}

/// Validate a schedule whose listing also claims a machine and duration per
/// operation (as schedule text does).
///
/// Claims that disagree with `instance` are reported as `wrong_domain`; the
/// timing checks then run against `instance`.
pub fn validate_listing(instance: &Instance, listing: &Instance, schedule: &Schedule) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (id, claimed) in listing.operations() {
        if let Some(actual) = instance.operation(id) {
            if actual.machine != claimed.machine || actual.duration != claimed.duration {
                report.push(
                    ViolationKind::WrongDomain,
                    format!(
                        "{id} listed as (M{}, {}) but the instance has (M{}, {})",
                        claimed.machine, claimed.duration, actual.machine, actual.duration
                    ),
                );
            }
        }
    }
    report.violations.extend(validate(instance, schedule).violations);
    report
}

/// Operations grouped by machine in `(job, op)` order.
pub fn machine_operations(instance: &Instance) -> BTreeMap<MachineId, BTreeSet<OpId>> {
    let mut map: BTreeMap<MachineId, BTreeSet<OpId>> = BTreeMap::new();
    for (id, op) in instance.operations() {
        map.entry(op.machine).or_default().insert(id);
    }
    map
}
