//! Dynamic job-shop scheduling: exact solving with maintenance windows,
//! disturbance events, severity routing, local repair, text formats for
//! prompt/response datasets, and response evaluation.

pub mod datasetgen;
pub mod eval;
pub mod events;
pub mod ft06;
pub mod jsp;
pub mod judge;
pub mod repair;
pub mod solver;
pub mod textio;

pub use datasetgen::{generate_dataset, make_record, DatasetRecord, GenConfig, GenSummary};
pub use eval::{evaluate_responses, mode_selection_matrix, EvalReport, ModeMatrix};
pub use events::{
    apply_event, run_processor, DynamicEvent, EventCategory, EventSummary, ProcessorTrace, Scenario, ScenarioMode,
};
pub use jsp::{
    completion_times, makespan, validate, Instance, JobLabel, JspError, MachineId, OpId, Operation, Schedule, Time,
    ValidationReport, Violation, ViolationKind, Window,
};
pub use judge::{classify_mode, disruption_score, DisruptionScore, Mode};
pub use repair::{local_repair, RepairResult};
pub use solver::{solve_dispatch, solve_exact, DispatchRule, SolveResult, SolveStatus};
pub use textio::{
    build_prompt, build_target, format_event_text, format_schedule_text, format_tasks_text, parse_event_text,
    parse_model_output, parse_orlib, parse_schedule_text, parse_tasks_text, FastPolicy, ParsedResponse, PromptBundle,
    TaskHeading,
};
