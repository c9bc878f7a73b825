//! Dynamic disturbance events, the processor that rewrites an instance after
//! each event, and seeded scenario sampling.

mod sample;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsp::{validate, Instance, JobLabel, JspError, MachineId, Operation, Schedule, Time, Window};

pub use sample::{random_instance, sample_scenario, SampleError, SamplingConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DynamicEvent {
    JobCancellation {
        job: JobLabel,
    },
    /// `op` is the 0-based position within the job.
    ProcessingTimeChange {
        job: JobLabel,
        op: usize,
        old_pt: Time,
        new_pt: Time,
    },
    MachineChange {
        job: JobLabel,
        op: usize,
        old_machine: MachineId,
        new_machine: MachineId,
    },
    JobInsertion {
        job: JobLabel,
        ops: Vec<Operation>,
    },
    MachineMaintenance {
        machine: MachineId,
        window: Window,
    },
}

/// The five event kinds, in the order multi-event scenarios list them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventCategory {
    JobCancellation,
    ProcessingTimeChange,
    MachineChange,
    JobInsertion,
    MachineMaintenance,
}

impl EventCategory {
    pub const ALL: [EventCategory; 5] = [
        EventCategory::JobCancellation,
        EventCategory::ProcessingTimeChange,
        EventCategory::MachineChange,
        EventCategory::JobInsertion,
        EventCategory::MachineMaintenance,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            EventCategory::JobCancellation => "JC",
            EventCategory::ProcessingTimeChange => "TC",
            EventCategory::MachineChange => "MC",
            EventCategory::JobInsertion => "JI",
            EventCategory::MachineMaintenance => "MM",
        }
    }
}

impl fmt::Display for EventCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl DynamicEvent {
    pub fn category(&self) -> EventCategory {
        match self {
            DynamicEvent::JobCancellation { .. } => EventCategory::JobCancellation,
            DynamicEvent::ProcessingTimeChange { .. } => EventCategory::ProcessingTimeChange,
            DynamicEvent::MachineChange { .. } => EventCategory::MachineChange,
            DynamicEvent::JobInsertion { .. } => EventCategory::JobInsertion,
            DynamicEvent::MachineMaintenance { .. } => EventCategory::MachineMaintenance,
        }
    }
}

/// Per-category event counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventSummary {
    pub job_cancellation: usize,
    pub processing_time_change: usize,
    pub machine_change: usize,
    pub job_insertion: usize,
    pub machine_maintenance: usize,
}

impl EventSummary {
    pub fn of(events: &[DynamicEvent]) -> Self {
        let mut s = EventSummary::default();
        for e in events {
            *s.slot(e.category()) += 1;
        }
        s
    }

    pub fn count(&self, category: EventCategory) -> usize {
        match category {
            EventCategory::JobCancellation => self.job_cancellation,
            EventCategory::ProcessingTimeChange => self.processing_time_change,
            EventCategory::MachineChange => self.machine_change,
            EventCategory::JobInsertion => self.job_insertion,
            EventCategory::MachineMaintenance => self.machine_maintenance,
        }
    }

    pub fn total(&self) -> usize {
        EventCategory::ALL.iter().map(|&c| self.count(c)).sum()
    }

    fn slot(&mut self, category: EventCategory) -> &mut usize {
        match category {
            EventCategory::JobCancellation => &mut self.job_cancellation,
            EventCategory::ProcessingTimeChange => &mut self.processing_time_change,
            EventCategory::MachineChange => &mut self.machine_change,
            EventCategory::JobInsertion => &mut self.job_insertion,
            EventCategory::MachineMaintenance => &mut self.machine_maintenance,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventError {
    #[error("job J{0} does not exist")]
    MissingJob(JobLabel),
    #[error("operation O{} of job J{job} does not exist", op + 1)]
    MissingOperation { job: JobLabel, op: usize },
    #[error("machine M{machine} does not exist (instance has {machine_count} machines)")]
    MissingMachine { machine: MachineId, machine_count: usize },
    #[error("stale event: {what} is {actual}, event expects {expected}")]
    Stale { what: String, expected: Time, actual: Time },
    #[error("job J{0} already exists")]
    DuplicateJob(JobLabel),
    #[error(transparent)]
    Invalid(#[from] JspError),
}

/// Rewrite `state` to reflect `event`. Everything the event does not touch is
/// carried over unchanged.
pub fn apply_event(state: &Instance, event: &DynamicEvent) -> Result<Instance, EventError> {
    let mut next = state.clone();
    match *event {
        DynamicEvent::JobCancellation { job } => {
            next.jobs_mut().remove(&job).ok_or(EventError::MissingJob(job))?;
        }
        DynamicEvent::ProcessingTimeChange {
            job,
            op,
            old_pt,
            new_pt,
        } => {
            let target = op_mut(&mut next, job, op)?;
            if target.duration != old_pt {
                return Err(EventError::Stale {
                    what: format!("processing time of J{job}.O{}", op + 1),
                    expected: old_pt,
                    actual: target.duration,
                });
            }
            if new_pt < 1 {
                return Err(JspError::NonPositiveDuration {
                    op: crate::jsp::OpId::new(job, op),
                    duration: new_pt,
                }
                .into());
            }
            target.duration = new_pt;
        }
        DynamicEvent::MachineChange {
            job,
            op,
            old_machine,
            new_machine,
        } => {
            let machine_count = state.machine_count();
            if new_machine >= machine_count {
                return Err(EventError::MissingMachine {
                    machine: new_machine,
                    machine_count,
                });
            }
            let target = op_mut(&mut next, job, op)?;
            if target.machine != old_machine {
                return Err(EventError::Stale {
                    what: format!("machine of J{job}.O{}", op + 1),
                    expected: old_machine as Time,
                    actual: target.machine as Time,
                });
            }
            target.machine = new_machine;
        }
        DynamicEvent::JobInsertion { job, ref ops } => {
            if state.job(job).is_some() {
                return Err(EventError::DuplicateJob(job));
            }
            let mut jobs = state.jobs().clone();
            jobs.insert(job, ops.clone());
            // Re-validate through the constructor: label, durations, machines.
            next = Instance::new(state.machine_count(), jobs, state.maintenance().clone())?;
        }
        DynamicEvent::MachineMaintenance { machine, window } => {
            if machine >= state.machine_count() {
                return Err(EventError::MissingMachine {
                    machine,
                    machine_count: state.machine_count(),
                });
            }
            let window = Window::new(window.start, window.end)?;
            next.add_window(machine, window);
        }
    }
    Ok(next)
}

fn op_mut(inst: &mut Instance, job: JobLabel, op: usize) -> Result<&mut Operation, EventError> {
    inst.jobs_mut()
        .get_mut(&job)
        .ok_or(EventError::MissingJob(job))?
        .get_mut(op)
        .ok_or(EventError::MissingOperation { job, op })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessorStep {
    pub event: DynamicEvent,
    pub state_after: Instance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessorTrace {
    pub steps: Vec<ProcessorStep>,
    pub final_state: Instance,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("event {step} cannot be applied: {source}")]
pub struct ProcessorError {
    /// 0-based index into the event list.
    pub step: usize,
    #[source]
    pub source: EventError,
}

/// Apply `events` in order, recording the instance after each one.
pub fn run_processor(baseline: &Instance, events: &[DynamicEvent]) -> Result<ProcessorTrace, ProcessorError> {
    let mut state = baseline.clone();
    let mut steps = Vec::with_capacity(events.len());
    for (step, event) in events.iter().enumerate() {
        state = apply_event(&state, event).map_err(|source| ProcessorError { step, source })?;
        steps.push(ProcessorStep {
            event: event.clone(),
            state_after: state.clone(),
        });
    }
    Ok(ProcessorTrace {
        steps,
        final_state: state,
    })
}

/// How a scenario is presented to a responder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioMode {
    Fast,
    Slow,
    /// Responder picks its own reasoning mode.
    Auto,
}

impl fmt::Display for ScenarioMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioMode::Fast => "fast",
            ScenarioMode::Slow => "slow",
            ScenarioMode::Auto => "auto",
        })
    }
}

/// Baseline, its schedule and the events to apply: the unit of dataset
/// generation and evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub baseline: Instance,
    pub baseline_schedule: Schedule,
    pub events: Vec<DynamicEvent>,
    pub mode: ScenarioMode,
    pub seed: u64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("baseline schedule is infeasible: {0}")]
    InfeasibleBaseline(String),
    #[error("fast scenarios need exactly one event, found {0}")]
    FastEventCount(usize),
    #[error("slow scenarios need at least two events, found {0}")]
    SlowEventCount(usize),
    #[error(transparent)]
    Processor(#[from] ProcessorError),
}

impl Scenario {
    /// Check every scenario invariant, including that the events apply.
    pub fn check(&self) -> Result<(), ScenarioError> {
        let report = validate(&self.baseline, &self.baseline_schedule);
        if let Some(v) = report.violations.first() {
            return Err(ScenarioError::InfeasibleBaseline(format!("{}: {}", v.kind, v.detail)));
        }
        match self.mode {
            ScenarioMode::Fast if self.events.len() != 1 => {
                return Err(ScenarioError::FastEventCount(self.events.len()))
            }
            ScenarioMode::Slow if self.events.len() < 2 => {
                return Err(ScenarioError::SlowEventCount(self.events.len()))
            }
            _ => {}
        }
        run_processor(&self.baseline, &self.events)?;
        Ok(())
    }

    pub fn trace(&self) -> Result<ProcessorTrace, ProcessorError> {
        run_processor(&self.baseline, &self.events)
    }

    /// Same scenario, presented with the auto-select tag.
    pub fn as_auto(&self) -> Scenario {
        Scenario {
            mode: ScenarioMode::Auto,
            ..self.clone()
        }
    }
}
