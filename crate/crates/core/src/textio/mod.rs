//! Text formats: schedule listings, task blocks, event sentences, prompts,
//! reasoning traces, and the OR-library instance layout.
//!
//! Every formatter has an inverse parser. Parsers tolerate extra or missing
//! whitespace between tokens and report the byte offset of the first error.

mod events;
mod orlib;
mod prompt;
mod response;
mod scan;
mod schedule;
mod tasks;

use thiserror::Error;

pub use events::{format_event_text, parse_event_text};
pub use orlib::{format_orlib, parse_orlib};
pub use prompt::{
    build_prompt, build_prompt_with, build_target, build_target_with, instruction_text, normalize_tag,
    parse_prompt_input, FastPolicy, Markers, PromptBundle, PromptInput, Target, TargetError, CONSTRAINTS, INSTRUCTION,
};
pub use response::{detect_mode, parse_model_output, parse_model_output_with, ParsedResponse};
pub use scan::ParseError;
pub use schedule::{format_schedule_text, parse_schedule_text, ScheduleText};
pub use tasks::{format_tasks_text, parse_tasks_text, TaskHeading};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("refusing to format an infeasible schedule: {0}")]
    InvalidSchedule(String),
    #[error("not representable in OR-library layout: {0}")]
    NotOrlib(String),
}
