use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsp::{Instance, JobLabel, OpId, Operation, Time, Window};
use crate::judge::Mode;
use crate::solver::{default_time_limit, solve_exact, SolveStatus};

use super::{apply_event, DynamicEvent, EventCategory, Scenario, ScenarioMode};

/// Inclusive ranges and options for [`sample_scenario`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub mode: Mode,
    pub jobs: (usize, usize),
    pub machines: (usize, usize),
    pub durations: (Time, Time),
    pub maintenance_length: (Time, Time),
    /// Fixed baseline; when `None` one is drawn from the ranges above.
    pub baseline: Option<Instance>,
    #[serde(skip, default = "default_time_limit")]
    pub time_limit: Duration,
}

impl SamplingConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            jobs: (2, 6),
            machines: (2, 6),
            durations: (1, 10),
            maintenance_length: (1, 5),
            baseline: None,
            time_limit: default_time_limit(),
        }
    }

    pub fn with_baseline(mut self, baseline: Instance) -> Self {
        self.baseline = Some(baseline);
        self
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("invalid sampling configuration: {0}")]
    Config(String),
    #[error("baseline could not be solved to optimality within the time limit")]
    BaselineNotOptimal,
    #[error("baseline cannot host a {category} event: {reason}")]
    Unsupported {
        category: EventCategory,
        reason: &'static str,
    },
}

/// Random FT-style instance: every job visits each machine once, in a random
/// order, with durations drawn uniformly from `durations`.
pub fn random_instance<R: Rng>(rng: &mut R, jobs: usize, machines: usize, durations: (Time, Time)) -> Instance {
    Instance::from_jobs(
        machines,
        (1..=jobs as JobLabel).map(|label| (label, random_job(rng, machines, durations))),
    )
    .expect("generated instance is well-formed")
}

fn random_job<R: Rng>(rng: &mut R, machines: usize, durations: (Time, Time)) -> Vec<Operation> {
    let mut order: Vec<usize> = (0..machines).collect();
    order.shuffle(rng);
    order
        .into_iter()
        .map(|m| Operation::new(m, rng.gen_range(durations.0..=durations.1)))
        .collect()
}

/// Draw a scenario deterministically from `(config, seed)`.
///
/// Fast mode draws one event of a uniformly chosen category. Slow mode draws
/// per-category counts (cancellations 0..=1, processing-time changes 1..=2,
/// machine changes 1..=2, insertions 0..=2, maintenance 0..=2) and emits them
/// in that category order. Each event is drawn against the state left by the
/// previous ones, so the list always applies cleanly.
pub fn sample_scenario(config: &SamplingConfig, seed: u64) -> Result<Scenario, SampleError> {
    check_config(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let baseline = match &config.baseline {
        Some(b) => b.clone(),
        None => {
            let n = rng.gen_range(config.jobs.0..=config.jobs.1);
            let m = rng.gen_range(config.machines.0..=config.machines.1);
            random_instance(&mut rng, n, m, config.durations)
        }
    };
    let solved = solve_exact(&baseline, config.time_limit);
    if solved.status != SolveStatus::Optimal {
        return Err(SampleError::BaselineNotOptimal);
    }

    let mut drawer = Drawer {
        rng: &mut rng,
        config,
        state: baseline.clone(),
        horizon: solved.makespan,
        next_label: baseline.max_job_label().unwrap_or(0) + 1,
        events: Vec::new(),
    };
    match config.mode {
        Mode::Fast => {
            let category = EventCategory::ALL[drawer.rng.gen_range(0..EventCategory::ALL.len())];
            drawer.draw(category)?;
        }
        Mode::Slow => {
            let counts = [
                drawer.rng.gen_range(0..=1),
                drawer.rng.gen_range(1..=2),
                drawer.rng.gen_range(1..=2),
                drawer.rng.gen_range(0..=2),
                drawer.rng.gen_range(0..=2),
            ];
            for (category, count) in EventCategory::ALL.into_iter().zip(counts) {
                for _ in 0..count {
                    // A cancellation must leave a job for the changes that follow.
                    if category == EventCategory::JobCancellation && drawer.state.job_count() < 2 {
                        continue;
                    }
                    drawer.draw(category)?;
                }
            }
        }
    }
    let events = drawer.events;

    Ok(Scenario {
        baseline,
        baseline_schedule: solved.schedule,
        events,
        mode: match config.mode {
            Mode::Fast => ScenarioMode::Fast,
            Mode::Slow => ScenarioMode::Slow,
        },
        seed,
    })
}

fn check_config(config: &SamplingConfig) -> Result<(), SampleError> {
    let bad = |msg: &str| Err(SampleError::Config(msg.to_string()));
    if config.baseline.is_none() && (config.jobs.0 < 1 || config.jobs.0 > config.jobs.1) {
        return bad("job range must satisfy 1 <= lo <= hi");
    }
    if config.baseline.is_none() && (config.machines.0 < 1 || config.machines.0 > config.machines.1) {
        return bad("machine range must satisfy 1 <= lo <= hi");
    }
    if config.durations.0 < 1 || config.durations.0 >= config.durations.1 {
        return bad("duration range must satisfy 1 <= lo < hi");
    }
    if config.maintenance_length.0 < 1 || config.maintenance_length.0 > config.maintenance_length.1 {
        return bad("maintenance length range must satisfy 1 <= lo <= hi");
    }
    Ok(())
}

struct Drawer<'a, R: Rng> {
    rng: &'a mut R,
    config: &'a SamplingConfig,
    state: Instance,
    horizon: Time,
    next_label: JobLabel,
    events: Vec<DynamicEvent>,
}

impl<R: Rng> Drawer<'_, R> {
    fn draw(&mut self, category: EventCategory) -> Result<(), SampleError> {
        let unsupported = |reason| SampleError::Unsupported { category, reason };
        let event = match category {
            EventCategory::JobCancellation => {
                let labels: Vec<JobLabel> = self.state.jobs().keys().copied().collect();
                let job = *labels
                    .get(self.rng.gen_range(0..labels.len().max(1)))
                    .ok_or_else(|| unsupported("no jobs"))?;
                DynamicEvent::JobCancellation { job }
            }
            EventCategory::ProcessingTimeChange => {
                let id = self.pick_op().ok_or_else(|| unsupported("no operations"))?;
                let old_pt = self.state.operation(id).expect("picked op exists").duration;
                let (lo, hi) = self.config.durations;
                let new_pt = loop {
                    let pt = self.rng.gen_range(lo..=hi);
                    if pt != old_pt {
                        break pt;
                    }
                };
                DynamicEvent::ProcessingTimeChange {
                    job: id.job,
                    op: id.op,
                    old_pt,
                    new_pt,
                }
            }
            EventCategory::MachineChange => {
                let m = self.state.machine_count();
                if m < 2 {
                    return Err(unsupported("needs at least two machines"));
                }
                let id = self.pick_op().ok_or_else(|| unsupported("no operations"))?;
                let old_machine = self.state.operation(id).expect("picked op exists").machine;
                let mut new_machine = self.rng.gen_range(0..m - 1);
                if new_machine >= old_machine {
                    new_machine += 1;
                }
                DynamicEvent::MachineChange {
                    job: id.job,
                    op: id.op,
                    old_machine,
                    new_machine,
                }
            }
            EventCategory::JobInsertion => {
                let m = self.state.machine_count();
                if m == 0 {
                    return Err(unsupported("no machines"));
                }
                let job = self.next_label;
                self.next_label += 1;
                DynamicEvent::JobInsertion {
                    job,
                    ops: random_job(self.rng, m, self.config.durations),
                }
            }
            EventCategory::MachineMaintenance => {
                let m = self.state.machine_count();
                if m == 0 {
                    return Err(unsupported("no machines"));
                }
                let machine = self.rng.gen_range(0..m);
                let start = self.rng.gen_range(0..=self.horizon);
                let (lo, hi) = self.config.maintenance_length;
                let length = self.rng.gen_range(lo..=hi);
                DynamicEvent::MachineMaintenance {
                    machine,
                    window: Window {
                        start,
                        end: start + length,
                    },
                }
            }
        };
        self.state = apply_event(&self.state, &event).expect("sampled events apply to the current state");
        self.events.push(event);
        Ok(())
    }

    fn pick_op(&mut self) -> Option<OpId> {
        let ops: Vec<OpId> = self.state.operations().map(|(id, _)| id).collect();
        if ops.is_empty() {
            return None;
        }
        Some(ops[self.rng.gen_range(0..ops.len())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ft06;
    use crate::jsp::validate;

    #[test]
    fn same_seed_same_scenario() {
        for mode in [Mode::Fast, Mode::Slow] {
            let cfg = SamplingConfig::new(mode);
            let a = sample_scenario(&cfg, 42).unwrap();
            let b = sample_scenario(&cfg, 42).unwrap();
            assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        }
    }

    #[test]
    fn slow_scenarios_have_at_least_two_events() {
        let cfg = SamplingConfig::new(Mode::Slow);
        for seed in 0..100 {
            let sc = sample_scenario(&cfg, seed).unwrap();
            assert!(sc.events.len() >= 2, "seed {seed}");
            assert!(sc.check().is_ok(), "seed {seed}");
            let s = crate::events::EventSummary::of(&sc.events);
            assert!((1..=2).contains(&s.processing_time_change));
            assert!((1..=2).contains(&s.machine_change));
            assert!(s.job_cancellation <= 1 && s.job_insertion <= 2 && s.machine_maintenance <= 2);
            // category order is preserved
            let cats: Vec<_> = sc.events.iter().map(|e| e.category()).collect();
            assert!(cats.windows(2).all(|w| w[0] <= w[1]), "seed {seed}: {cats:?}");
        }
    }

    #[test]
    fn fast_scenarios_have_one_event_and_valid_baseline() {
        let cfg = SamplingConfig::new(Mode::Fast);
        for seed in 0..100 {
            let sc = sample_scenario(&cfg, seed).unwrap();
            assert_eq!(sc.events.len(), 1);
            assert!(validate(&sc.baseline, &sc.baseline_schedule).feasible());
            let (n, m) = (sc.baseline.job_count(), sc.baseline.machine_count());
            assert!((2..=6).contains(&n) && (2..=6).contains(&m));
        }
    }

    #[test]
    fn fixed_baseline_is_used() {
        let cfg = SamplingConfig::new(Mode::Slow).with_baseline(ft06::ft06());
        let sc = sample_scenario(&cfg, 7).unwrap();
        assert_eq!(sc.baseline, ft06::ft06());
        assert_eq!(crate::jsp::makespan(&sc.baseline, &sc.baseline_schedule).unwrap(), 55);
    }

    #[test]
    fn single_machine_baseline_cannot_host_machine_change() {
        let inst = Instance::from_jobs(1, [(1, vec![Operation::new(0, 2)]), (2, vec![Operation::new(0, 3)])]).unwrap();
        let cfg = SamplingConfig::new(Mode::Slow).with_baseline(inst);
        assert!(matches!(
            sample_scenario(&cfg, 1),
            Err(SampleError::Unsupported {
                category: EventCategory::MachineChange,
                ..
            })
        ));
    }

    #[test]
    fn inserted_labels_are_fresh() {
        let cfg = SamplingConfig::new(Mode::Slow);
        for seed in 0..50 {
            let sc = sample_scenario(&cfg, seed).unwrap();
            let max = sc.baseline.max_job_label().unwrap();
            let mut expected = max + 1;
            for e in &sc.events {
                if let DynamicEvent::JobInsertion { job, .. } = e {
                    assert_eq!(*job, expected);
                    expected += 1;
                }
            }
        }
    }
}
