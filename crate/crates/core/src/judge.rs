//! Severity routing: decides whether a disturbance gets the fast (direct
//! answer) or slow (step-by-step) treatment.
//!
//! Routing depends on the event count only. [`disruption_score`] quantifies
//! the disturbance for reporting and never influences the route.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{apply_event, DynamicEvent, Scenario};
use crate::jsp::{JobLabel, OpId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fast,
    Slow,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fast => "fast",
            Mode::Slow => "slow",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Mode::Fast),
            "slow" => Ok(Mode::Slow),
            other => Err(format!("unknown mode '{other}' (expected fast or slow)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JudgeError {
    #[error("cannot classify an empty event list")]
    NoEvents,
}

/// One event routes to [`Mode::Fast`], several to [`Mode::Slow`].
pub fn classify_mode(events: &[DynamicEvent]) -> Result<Mode, JudgeError> {
    match events.len() {
        0 => Err(JudgeError::NoEvents),
        1 => Ok(Mode::Fast),
        _ => Ok(Mode::Slow),
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisruptionScore {
    pub affected_ops: usize,
    pub maintenance_conflicts: usize,
    pub structural_changes: usize,
    pub total: usize,
}

/// Count what the events touch.
///
/// * `affected_ops`: distinct operations whose machine or duration an event
///   actually changed, plus every operation of inserted or cancelled jobs.
/// * `maintenance_conflicts`: (new window, baseline operation) pairs whose
///   intervals overlap on the same machine.
/// * `structural_changes`: inserted plus cancelled jobs.
///
/// Counts accumulate over events, so appending an event never lowers the total.
/// Events that do not apply are skipped.
pub fn disruption_score(scenario: &Scenario) -> DisruptionScore {
    let mut touched: BTreeSet<OpId> = BTreeSet::new();
    let mut structural_jobs: BTreeSet<(bool, JobLabel)> = BTreeSet::new();
    let mut maintenance_conflicts = 0;
    let mut state = scenario.baseline.clone();

    for event in &scenario.events {
        match event {
            DynamicEvent::JobCancellation { job } => {
                if let Some(ops) = state.job(*job) {
                    touched.extend((0..ops.len()).map(|k| OpId::new(*job, k)));
                }
                structural_jobs.insert((false, *job));
            }
            DynamicEvent::ProcessingTimeChange {
                job,
                op,
                old_pt,
                new_pt,
            } if old_pt != new_pt => {
                touched.insert(OpId::new(*job, *op));
            }
            DynamicEvent::MachineChange {
                job,
                op,
                old_machine,
                new_machine,
            } if old_machine != new_machine => {
                touched.insert(OpId::new(*job, *op));
            }
            DynamicEvent::JobInsertion { job, ops } => {
                touched.extend((0..ops.len()).map(|k| OpId::new(*job, k)));
                structural_jobs.insert((true, *job));
            }
            DynamicEvent::MachineMaintenance { machine, window } => {
                maintenance_conflicts += scenario
                    .baseline
                    .operations()
                    .filter(|(_, op)| op.machine == *machine)
                    .filter_map(|(id, op)| {
                        scenario
                            .baseline_schedule
                            .start(id)
                            .map(|s| window.overlaps(s, op.duration))
                    })
                    .filter(|&hit| hit)
                    .count();
            }
            _ => {}
        }
        if let Ok(next) = apply_event(&state, event) {
            state = next;
        }
    }

    let affected_ops = touched.len();
    let structural_changes = structural_jobs.len();
    DisruptionScore {
        affected_ops,
        maintenance_conflicts,
        structural_changes,
        total: affected_ops + maintenance_conflicts + structural_changes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::ScenarioMode;
    use crate::ft06;
    use crate::jsp::Window;

    fn ft06_scenario(events: Vec<DynamicEvent>) -> Scenario {
        Scenario {
            baseline: ft06::ft06(),
            baseline_schedule: ft06::baseline_schedule(),
            events,
            mode: ScenarioMode::Auto,
            seed: 0,
        }
    }

    #[test]
    fn one_event_is_fast() {
        let e = DynamicEvent::ProcessingTimeChange {
            job: 1,
            op: 0,
            old_pt: 1,
            new_pt: 2,
        };
        assert_eq!(classify_mode(&[e]), Ok(Mode::Fast));
    }

    #[test]
    fn five_events_are_slow() {
        assert_eq!(classify_mode(&ft06::five_event_sequence()), Ok(Mode::Slow));
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(classify_mode(&[]), Err(JudgeError::NoEvents));
    }

    #[test]
    fn single_pt_change_scores_one() {
        let sc = ft06_scenario(vec![DynamicEvent::ProcessingTimeChange {
            job: 3,
            op: 0,
            old_pt: 5,
            new_pt: 10,
        }]);
        let s = disruption_score(&sc);
        assert_eq!(
            s,
            DisruptionScore {
                affected_ops: 1,
                maintenance_conflicts: 0,
                structural_changes: 0,
                total: 1
            }
        );
    }

    #[test]
    fn five_event_score() {
        let s = disruption_score(&ft06_scenario(ft06::five_event_sequence()));
        assert_eq!(s.affected_ops, 4);
        // [8, 11) on M1 hits J4.O1 at [8, 13); J2.O1 at [0, 8) only touches it.
        assert_eq!(s.maintenance_conflicts, 1);
        assert_eq!(s.structural_changes, 0);
        assert_eq!(s.total, 5);
    }

    #[test]
    fn window_in_idle_gap_has_no_conflict() {
        // M2 is idle between J1.O1 ending at 6 and J2.O2 starting at 8.
        let sc = ft06_scenario(vec![DynamicEvent::MachineMaintenance {
            machine: 2,
            window: Window { start: 6, end: 8 },
        }]);
        assert_eq!(disruption_score(&sc).maintenance_conflicts, 0);
    }

    #[test]
    fn no_events_scores_zero() {
        assert_eq!(disruption_score(&ft06_scenario(vec![])), DisruptionScore::default());
    }

    #[test]
    fn structural_changes_count_jobs() {
        let sc = ft06_scenario(vec![
            DynamicEvent::JobCancellation { job: 2 },
            DynamicEvent::JobInsertion {
                job: 7,
                ops: vec![crate::jsp::Operation::new(0, 3)],
            },
        ]);
        let s = disruption_score(&sc);
        assert_eq!(s.structural_changes, 2);
        assert_eq!(s.affected_ops, 7);
    }
}
