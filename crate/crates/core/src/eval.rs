//! Scoring of responder outputs: feasibility against the processor's ground
//! truth, optimality against the exact solver, local-adjustment stability,
//! and reasoning-mode selection.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::Scenario;
use crate::jsp::{makespan, validate, validate_listing, Instance, Time};
use crate::judge::{classify_mode, Mode};
use crate::repair::affected_operations;
use crate::solver::{default_time_limit, solve_exact, SolveStatus};
use crate::textio::ParsedResponse;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("{scenarios} scenarios but {responses} responses")]
    LengthMismatch { scenarios: usize, responses: usize },
    #[error("mode selection needs at least one record")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Fast responses must reproduce the post-event tasks before the schedule
    /// is checked. Turning this off checks the schedule alone.
    pub require_task_match: bool,
    #[serde(skip, default = "default_time_limit")]
    pub time_limit: Duration,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            require_task_match: true,
            time_limit: default_time_limit(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub reason: Option<String>,
    /// Makespan of the response: the listed schedule (fast) or the re-solved
    /// task block (slow).
    pub makespan: Option<Time>,
}

impl Feasibility {
    fn no(reason: impl Into<String>) -> Self {
        Self {
            feasible: false,
            reason: Some(reason.into()),
            makespan: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimality {
    Optimal,
    Suboptimal,
    /// The exact solve hit its time limit.
    Unknown,
}

/// Ground truth for one scenario.
struct Truth {
    final_state: Instance,
    optimum: Option<Time>,
}

fn truth(scenario: &Scenario, time_limit: Duration) -> Result<Truth, String> {
    let trace = scenario.trace().map_err(|e| e.to_string())?;
    let r = solve_exact(&trace.final_state, time_limit);
    Ok(Truth {
        optimum: (r.status == SolveStatus::Optimal).then_some(r.makespan),
        final_state: trace.final_state,
    })
}

pub fn check_feasibility(scenario: &Scenario, response: &ParsedResponse) -> Feasibility {
    let options = EvalOptions::default();
    match truth(scenario, options.time_limit) {
        Ok(t) => feasibility(&t, response, &options),
        Err(e) => Feasibility::no(format!("scenario events do not apply: {e}")),
    }
}

/// `None` when the response is infeasible.
pub fn check_optimality(scenario: &Scenario, response: &ParsedResponse) -> Option<Optimality> {
    let options = EvalOptions::default();
    let t = truth(scenario, options.time_limit).ok()?;
    let f = feasibility(&t, response, &options);
    f.feasible.then(|| optimality(&t, response, f.makespan))
}

fn feasibility(t: &Truth, response: &ParsedResponse, options: &EvalOptions) -> Feasibility {
    if !response.parse_ok {
        return Feasibility::no(format!("unparsed: {}", response.diagnostics.join("; ")));
    }
    match response.mode {
        Some(Mode::Fast) => {
            let (Some(tasks), Some(schedule), Some(listing)) = (
                &response.final_tasks,
                &response.final_schedule,
                &response.schedule_listing,
            ) else {
                return Feasibility::no("fast response lacks tasks or schedule");
            };
            if options.require_task_match && !tasks.same_tasks(&t.final_state) {
                return Feasibility::no("task block differs from the post-event instance");
            }
            let report = validate_listing(&t.final_state, listing, schedule);
            if !report.feasible() {
                let all: Vec<String> = report
                    .violations
                    .iter()
                    .map(|v| format!("{}: {}", v.kind, v.detail))
                    .collect();
                return Feasibility::no(all.join("; "));
            }
            Feasibility {
                feasible: true,
                reason: None,
                makespan: makespan(&t.final_state, schedule).ok(),
            }
        }
        _ => {
            let Some(tasks) = &response.final_tasks else {
                return Feasibility::no("slow response lacks a final task block");
            };
            let r = solve_exact(tasks, options.time_limit);
            if r.status == SolveStatus::Infeasible || !validate(tasks, &r.schedule).feasible() {
                return Feasibility::no("final task block does not re-solve");
            }
            Feasibility {
                feasible: true,
                reason: None,
                makespan: (r.status == SolveStatus::Optimal).then_some(r.makespan),
            }
        }
    }
}

fn optimality(t: &Truth, response: &ParsedResponse, response_makespan: Option<Time>) -> Optimality {
    let (Some(opt), Some(c)) = (t.optimum, response_makespan) else {
        return Optimality::Unknown;
    };
    let right_tasks = response
        .final_tasks
        .as_ref()
        .is_some_and(|i| i.same_tasks(&t.final_state));
    if c == opt && (response.mode == Some(Mode::Fast) || right_tasks) {
        Optimality::Optimal
    } else {
        Optimality::Suboptimal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub index: usize,
    pub seed: u64,
    pub true_mode: Option<Mode>,
    pub chosen_mode: Option<Mode>,
    pub parsed: bool,
    pub feasible: bool,
    pub optimality: Option<Optimality>,
    pub makespan: Option<Time>,
    pub optimum: Option<Time>,
    pub gap: Option<f64>,
    /// Fast responses: operations outside the repair's affected set whose
    /// start differs from the baseline.
    pub moved_unaffected: Option<usize>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub total: usize,
    pub parsed: usize,
    pub feasible: usize,
    pub optimal: usize,
    pub unknown: usize,
    pub feasibility_rate: f64,
    pub optimality_rate: f64,
    /// Mean of `(response - optimum) / optimum` over feasible responses with a
    /// known optimum.
    pub mean_gap: Option<f64>,
    pub per_scenario: Vec<ScenarioRow>,
}

pub fn evaluate_responses(scenarios: &[Scenario], responses: &[ParsedResponse]) -> Result<EvalReport, EvalError> {
    evaluate_responses_with(scenarios, responses, &EvalOptions::default())
}

pub fn evaluate_responses_with(
    scenarios: &[Scenario],
    responses: &[ParsedResponse],
    options: &EvalOptions,
) -> Result<EvalReport, EvalError> {
    if scenarios.len() != responses.len() {
        return Err(EvalError::LengthMismatch {
            scenarios: scenarios.len(),
            responses: responses.len(),
        });
    }
    let rows: Vec<ScenarioRow> = scenarios
        .par_iter()
        .zip(responses.par_iter())
        .enumerate()
        .map(|(index, (sc, resp))| evaluate_one(index, sc, resp, options))
        .collect();
    Ok(aggregate(rows))
}

fn evaluate_one(index: usize, sc: &Scenario, resp: &ParsedResponse, options: &EvalOptions) -> ScenarioRow {
    let mut row = ScenarioRow {
        index,
        seed: sc.seed,
        true_mode: classify_mode(&sc.events).ok(),
        chosen_mode: resp.mode,
        parsed: resp.parse_ok,
        feasible: false,
        optimality: None,
        makespan: None,
        optimum: None,
        gap: None,
        moved_unaffected: None,
        reason: None,
    };
    let t = match truth(sc, options.time_limit) {
        Ok(t) => t,
        Err(e) => {
            row.reason = Some(format!("scenario events do not apply: {e}"));
            return row;
        }
    };
    row.optimum = t.optimum;
    let f = feasibility(&t, resp, options);
    row.feasible = f.feasible;
    row.reason = f.reason.clone();
    row.makespan = f.makespan;
    if !f.feasible {
        return row;
    }
    let opt = optimality(&t, resp, f.makespan);
    row.optimality = Some(opt);
    if opt == Optimality::Unknown {
        row.reason = Some("exact solve hit the time limit; optimality unknown".into());
    }
    if let (Some(c), Some(o)) = (f.makespan, t.optimum) {
        if o > 0 {
            row.gap = Some((c - o) as f64 / o as f64);
        }
    }
    if let (Some(Mode::Fast), Some(schedule)) = (resp.mode, &resp.final_schedule) {
        if let Ok(affected) = affected_operations(&sc.baseline, &sc.baseline_schedule, &sc.events) {
            let moved = sc
                .baseline_schedule
                .iter()
                .filter(|(id, _)| !affected.contains(id))
                .filter(|&(id, s)| schedule.start(id).is_some_and(|r| r != s))
                .count();
            row.moved_unaffected = Some(moved);
        }
    }
    row
}

fn aggregate(rows: Vec<ScenarioRow>) -> EvalReport {
    let total = rows.len();
    let parsed = rows.iter().filter(|r| r.parsed).count();
    let feasible = rows.iter().filter(|r| r.feasible).count();
    let optimal = rows
        .iter()
        .filter(|r| r.optimality == Some(Optimality::Optimal))
        .count();
    let unknown = rows
        .iter()
        .filter(|r| r.optimality == Some(Optimality::Unknown))
        .count();
    let gaps: Vec<f64> = rows.iter().filter_map(|r| r.gap).collect();
    let rate = |k: usize| if total == 0 { 0.0 } else { k as f64 / total as f64 };
    EvalReport {
        total,
        parsed,
        feasible,
        optimal,
        unknown,
        feasibility_rate: rate(feasible),
        optimality_rate: rate(optimal),
        mean_gap: (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64),
        per_scenario: rows,
    }
}

/// `count / total` as a percentage with two decimals, rounded half up, in
/// exact integer arithmetic.
pub fn percent(count: usize, total: usize) -> String {
    if total == 0 {
        return "0.00%".into();
    }
    let hundredths = (count as u128 * 20_000 + total as u128) / (2 * total as u128);
    format!("{}.{:02}%", hundredths / 100, hundredths % 100)
}

impl EvalReport {
    pub fn feasibility_percent(&self) -> String {
        percent(self.feasible, self.total)
    }

    pub fn optimality_percent(&self) -> String {
        percent(self.optimal, self.total)
    }

    /// Stable `key: value` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "total: {}", self.total).unwrap();
        writeln!(out, "parsed: {}", self.parsed).unwrap();
        writeln!(out, "feasible: {}", self.feasible).unwrap();
        writeln!(out, "optimal: {}", self.optimal).unwrap();
        writeln!(out, "optimality_unknown: {}", self.unknown).unwrap();
        writeln!(out, "feasibility_rate: {}", self.feasibility_percent()).unwrap();
        writeln!(out, "optimality_rate: {}", self.optimality_percent()).unwrap();
        match self.mean_gap {
            Some(g) => writeln!(out, "mean_gap: {g:.4}").unwrap(),
            None => writeln!(out, "mean_gap: n/a").unwrap(),
        }
        let moved: usize = self.per_scenario.iter().filter_map(|r| r.moved_unaffected).sum();
        writeln!(out, "moved_unaffected_ops: {moved}").unwrap();
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeMatrix {
    /// `counts[true][chosen]`.
    pub counts: BTreeMap<Mode, BTreeMap<Mode, usize>>,
}

impl ModeMatrix {
    pub fn count(&self, truth: Mode, chosen: Mode) -> usize {
        self.counts
            .get(&truth)
            .and_then(|r| r.get(&chosen))
            .copied()
            .unwrap_or(0)
    }

    pub fn row_total(&self, truth: Mode) -> usize {
        self.counts.get(&truth).map_or(0, |r| r.values().sum())
    }

    /// Share of `truth` scenarios routed to `chosen`, as a display percentage.
    pub fn share(&self, truth: Mode, chosen: Mode) -> String {
        percent(self.count(truth, chosen), self.row_total(truth))
    }

    pub fn accuracy(&self, truth: Mode) -> Option<f64> {
        let total = self.row_total(truth);
        (total > 0).then(|| self.count(truth, truth) as f64 / total as f64)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for truth in [Mode::Fast, Mode::Slow] {
            if self.row_total(truth) == 0 {
                continue;
            }
            writeln!(
                out,
                "{truth}: n={} chose_fast={} ({}) chose_slow={} ({})",
                self.row_total(truth),
                self.count(truth, Mode::Fast),
                self.share(truth, Mode::Fast),
                self.count(truth, Mode::Slow),
                self.share(truth, Mode::Slow)
            )
            .unwrap();
        }
        out
    }
}

/// Tabulate `(true mode, chosen mode)` pairs.
pub fn mode_selection_matrix(records: &[(Mode, Mode)]) -> Result<ModeMatrix, EvalError> {
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut m = ModeMatrix::default();
    for &(truth, chosen) in records {
        *m.counts.entry(truth).or_default().entry(chosen).or_default() += 1;
    }
    Ok(m)
}
