use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{DynamicEvent, ProcessorError, Scenario, ScenarioMode};
use crate::jsp::{Instance, Schedule, Time};
use crate::judge::{classify_mode, Mode};
use crate::repair::{local_repair, RepairError};
use crate::solver::{solve_exact, SolveStatus};

use super::events::{format_event_text, scan_events};
use super::scan::{ParseError, Scanner};
use super::schedule::{format_schedule_text, scan_schedule};
use super::tasks::{format_tasks_text, TaskHeading};
use super::FormatError;

pub const INSTRUCTION: &str = "You are given a current schedule for a Job Shop Scheduling Problem (JSSP), as well as one or more dynamic events. Based on the impact of the dynamic event, you are required to: 1. Generate updated scheduling tasks. 2. Generate machine unavailability intervals. 3. If the dynamic event has a minor impact on the current schedules, producing locally adjusted schedules that adapts the original schedule to these changes while minimizing disruption to unaffected operations.";

pub const CONSTRAINTS: &str = "The locally adjusted schedules must strictly satisfy the following constraints: 1. Each operation must be processed exactly once. 2. All operations of each job must be processed in the given order. 3. Each operation must be processed on its designated machine. 4. Each machine can process at most one operation at any given time. 5. Preemption is not allowed: once an operation starts, it must be processed continuously until completion. 6. No operation may be scheduled during machine unavailability intervals. 7. The adjustment should be local, meaning that only operations affected by the dynamic events should be rescheduled whenever possible, while preserving the original schedule for unaffected operations.";

const SCHEDULES_HEAD: &str = "The current schedules:";
const EVENTS_HEAD: &str = "The dynamic event:";

/// Mode identifiers and reasoning delimiters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Markers {
    pub no_think: String,
    pub auto_think: String,
    pub reasoning_open: String,
    pub reasoning_close: String,
}

impl Default for Markers {
    fn default() -> Self {
        Self {
            no_think: "/no_think".into(),
            auto_think: "/auto_think".into(),
            reasoning_open: "[unused16]".into(),
            reasoning_close: "[unused17]".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub instruction: String,
    /// Problem description, with the mode tag already appended.
    pub input: String,
    pub mode_tag: Option<String>,
}

/// Instruction text: task statement followed by the constraint list.
pub fn instruction_text() -> String {
    format!("{INSTRUCTION} {CONSTRAINTS}")
}

pub fn build_prompt(scenario: &Scenario) -> Result<PromptBundle, FormatError> {
    build_prompt_with(scenario, &Markers::default())
}

pub fn build_prompt_with(scenario: &Scenario, markers: &Markers) -> Result<PromptBundle, FormatError> {
    let schedule = format_schedule_text(&scenario.baseline, &scenario.baseline_schedule)?;
    let events: Vec<String> = scenario.events.iter().map(format_event_text).collect();
    let mut input = format!("{SCHEDULES_HEAD} {schedule} {EVENTS_HEAD} {}", events.join(" "));
    let mode_tag = match scenario.mode {
        ScenarioMode::Fast => Some(markers.no_think.clone()),
        ScenarioMode::Auto => Some(markers.auto_think.clone()),
        ScenarioMode::Slow => None,
    };
    if let Some(tag) = &mode_tag {
        input.push(' ');
        input.push_str(tag);
    }
    Ok(PromptBundle {
        instruction: instruction_text(),
        input,
        mode_tag,
    })
}

/// Problem description recovered from prompt input text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptInput {
    /// Jobs as listed in the schedule text; no maintenance.
    pub baseline: Instance,
    pub schedule: Schedule,
    pub makespan: Time,
    pub events: Vec<DynamicEvent>,
    pub mode: ScenarioMode,
}

/// Inverse of the `input` field. Accepts `/no_think`, `no_think` and
/// `**no_think**` spellings (likewise for auto).
pub fn parse_prompt_input(text: &str) -> Result<PromptInput, ParseError> {
    let mut s = Scanner::new(text);
    s.expect(SCHEDULES_HEAD)?;
    let parsed = scan_schedule(&mut s)?;
    s.expect(EVENTS_HEAD)?;
    let events = scan_events(&mut s)?;
    if events.is_empty() {
        return Err(s.error("no event sentences found"));
    }
    s.skip_ws();
    let at = s.pos();
    let mode = match normalize_tag(s.rest().trim()) {
        Some(m) => m,
        None => {
            let snippet: String = s.rest().chars().take(24).collect();
            return Err(ParseError::new(at, format!("unrecognized mode tag '{snippet}'")));
        }
    };
    Ok(PromptInput {
        baseline: parsed.instance,
        schedule: parsed.schedule,
        makespan: parsed.makespan,
        events,
        mode,
    })
}

/// Mode named by a trailing tag; empty means slow.
pub fn normalize_tag(tag: &str) -> Option<ScenarioMode> {
    let bare = tag.trim().trim_matches('*').trim_start_matches('/');
    match bare {
        "" => Some(ScenarioMode::Slow),
        "no_think" => Some(ScenarioMode::Fast),
        "auto_think" => Some(ScenarioMode::Auto),
        _ => None,
    }
}

/// How fast targets obtain the revised schedule.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FastPolicy {
    /// Re-solve the post-event instance to optimality.
    #[default]
    ExactResolve,
    /// Local repair of the baseline schedule.
    LocalRepair,
}

impl std::str::FromStr for FastPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "exact_resolve" => Ok(FastPolicy::ExactResolve),
            "repair" | "local_repair" => Ok(FastPolicy::LocalRepair),
            other => Err(format!("unknown fast policy '{other}' (expected exact or repair)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum TargetError {
    #[error(transparent)]
    Events(#[from] ProcessorError),
    #[error("scenario has no events")]
    NoEvents,
    #[error("exact solve of the post-event instance ended {0:?} within {1:?}")]
    SolverLimit(SolveStatus, Duration),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Format(#[from] FormatError),
}

/// Expected response for a scenario plus the values it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub text: String,
    /// Response mode; auto scenarios resolve through the event count.
    pub mode: Mode,
    pub final_state: Instance,
    /// Fast only: the revised schedule and its makespan.
    pub revised: Option<(Schedule, Time)>,
}

pub fn build_target(scenario: &Scenario, policy: FastPolicy, time_limit: Duration) -> Result<Target, TargetError> {
    build_target_with(scenario, policy, time_limit, &Markers::default())
}

pub fn build_target_with(
    scenario: &Scenario,
    policy: FastPolicy,
    time_limit: Duration,
    markers: &Markers,
) -> Result<Target, TargetError> {
    let mode = match scenario.mode {
        ScenarioMode::Fast => Mode::Fast,
        ScenarioMode::Slow => Mode::Slow,
        ScenarioMode::Auto => classify_mode(&scenario.events).map_err(|_| TargetError::NoEvents)?,
    };
    let trace = scenario.trace()?;
    let final_state = trace.final_state.clone();
    match mode {
        Mode::Fast => {
            let (schedule, makespan) = match policy {
                FastPolicy::ExactResolve => {
                    let r = solve_exact(&final_state, time_limit);
                    if r.status != SolveStatus::Optimal {
                        return Err(TargetError::SolverLimit(r.status, time_limit));
                    }
                    (r.schedule, r.makespan)
                }
                FastPolicy::LocalRepair => {
                    let r = local_repair(scenario)?;
                    (r.schedule, r.makespan)
                }
            };
            let text = format!(
                "{}{}",
                format_tasks_text(&final_state, TaskHeading::New),
                format_schedule_text(&final_state, &schedule)?
            );
            Ok(Target {
                text,
                mode,
                final_state,
                revised: Some((schedule, makespan)),
            })
        }
        Mode::Slow => {
            let mut text = markers.reasoning_open.clone();
            for step in &trace.steps {
                text.push_str(&format_event_text(&step.event));
                text.push_str(&format_tasks_text(&step.state_after, TaskHeading::Current));
            }
            text.push_str(&markers.reasoning_close);
            text.push_str(&format_tasks_text(&final_state, TaskHeading::New));
            Ok(Target {
                text,
                mode,
                final_state,
                revised: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ft06;
    use crate::jsp::Window;

    fn scenario(events: Vec<DynamicEvent>, mode: ScenarioMode) -> Scenario {
        Scenario {
            baseline: ft06::ft06(),
            baseline_schedule: ft06::baseline_schedule(),
            events,
            mode,
            seed: 0,
        }
    }

    fn mm() -> DynamicEvent {
        DynamicEvent::MachineMaintenance {
            machine: 1,
            window: Window { start: 8, end: 11 },
        }
    }

    #[test]
    fn tags() {
        let fast = build_prompt(&scenario(vec![mm()], ScenarioMode::Fast)).unwrap();
        assert!(fast.input.ends_with("[8, 11]. /no_think"));
        let slow = build_prompt(&scenario(ft06::five_event_sequence(), ScenarioMode::Slow)).unwrap();
        assert!(slow.input.ends_with("[8, 11]."));
        assert_eq!(slow.mode_tag, None);
        let auto = build_prompt(&scenario(vec![mm()], ScenarioMode::Auto)).unwrap();
        assert!(auto.input.ends_with(" /auto_think"));
    }

    #[test]
    fn prompt_input_round_trip() {
        let sc = scenario(ft06::five_event_sequence(), ScenarioMode::Slow);
        let back = parse_prompt_input(&build_prompt(&sc).unwrap().input).unwrap();
        assert_eq!(back.baseline, sc.baseline);
        assert_eq!(back.schedule, sc.baseline_schedule);
        assert_eq!(back.events, sc.events);
        assert_eq!(back.mode, ScenarioMode::Slow);
    }

    #[test]
    fn tag_spellings() {
        for t in ["/no_think", "no_think", "**no_think**", "**/no_think**"] {
            assert_eq!(normalize_tag(t), Some(ScenarioMode::Fast), "{t}");
        }
        assert_eq!(normalize_tag("**auto_think**"), Some(ScenarioMode::Auto));
        assert_eq!(normalize_tag("think hard"), None);
    }

    #[test]
    fn slow_target_opening() {
        let sc = scenario(ft06::five_event_sequence(), ScenarioMode::Slow);
        let t = build_target(&sc, FastPolicy::ExactResolve, Duration::from_secs(60)).unwrap();
        assert!(t.text.starts_with(
            "[unused16]Processing time change event: the processing time of operation O1 belonging to job J3 is updated from 5 to 10.The current tasks: J1: {(O1, M2, PT1), "
        ));
        assert!(t.text.contains("[unused17]The new tasks: "));
        assert!(t.text.ends_with("The unavailable intervals of machines: M1: [(8, 11)]"));
    }

    #[test]
    fn fast_exact_target_is_optimal() {
        let sc = scenario(vec![mm()], ScenarioMode::Fast);
        let t = build_target(&sc, FastPolicy::ExactResolve, Duration::from_secs(60)).unwrap();
        let (_, c) = t.revised.unwrap();
        assert_eq!(c, solve_exact(&t.final_state, Duration::from_secs(60)).makespan);
        assert!(t.text.starts_with("The new tasks: J1: "));
        assert!(t.text.ends_with(&format!("MakeSpan={c}")));
    }
}
