use serde::{Deserialize, Serialize};

use crate::jsp::{Instance, Schedule, Time};
use crate::judge::Mode;

use super::prompt::Markers;
use super::scan::Scanner;
use super::schedule::scan_schedule;
use super::tasks::{scan_tasks, TaskHeading};

/// Structured view of a responder's text. Never built from a failed parse
/// silently: every problem lands in `diagnostics`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedResponse {
    /// Mode the text's structure indicates.
    pub mode: Option<Mode>,
    pub reasoning: Option<String>,
    pub final_tasks: Option<Instance>,
    pub final_schedule: Option<Schedule>,
    /// Jobs as the schedule text lists them (machines and durations claimed
    /// per tuple).
    pub schedule_listing: Option<Instance>,
    pub listed_makespan: Option<Time>,
    pub parse_ok: bool,
    pub diagnostics: Vec<String>,
}

/// Mode a response's structure indicates: a reasoning delimiter means slow,
/// schedule text means fast.
pub fn detect_mode(text: &str, markers: &Markers) -> Option<Mode> {
    if text.contains(&markers.reasoning_open) || text.contains(&markers.reasoning_close) {
        Some(Mode::Slow)
    } else if text.contains(super::schedule::SEGMENT_HEAD) {
        Some(Mode::Fast)
    } else if text.contains(TaskHeading::New.text()) {
        Some(Mode::Slow)
    } else {
        None
    }
}

pub fn parse_model_output(text: &str, expected_mode: Mode) -> ParsedResponse {
    parse_model_output_with(text, expected_mode, &Markers::default())
}

/// Parse a response. The parse follows the text's own structure; a
/// disagreement with `expected_mode` is recorded as a diagnostic.
pub fn parse_model_output_with(text: &str, expected_mode: Mode, markers: &Markers) -> ParsedResponse {
    let mut r = ParsedResponse {
        mode: detect_mode(text, markers),
        ..ParsedResponse::default()
    };
    match r.mode {
        None => {
            r.diagnostics
                .push("no task block, schedule or reasoning markers found".into());
            return r;
        }
        Some(m) if m != expected_mode => {
            r.diagnostics
                .push(format!("expected a {expected_mode} response, found a {m} one"));
        }
        _ => {}
    }
    let ok = match r.mode {
        Some(Mode::Fast) => parse_fast(text, &mut r),
        _ => parse_slow(text, markers, &mut r),
    };
    r.parse_ok = ok && (r.final_tasks.is_some() || r.final_schedule.is_some());
    r
}

fn parse_fast(text: &str, r: &mut ParsedResponse) -> bool {
    let mut s = Scanner::new(text);
    match scan_tasks(&mut s) {
        Ok((_, inst)) => r.final_tasks = Some(inst),
        Err(e) => {
            r.diagnostics.push(format!("task block: {e}"));
            return false;
        }
    }
    match scan_schedule(&mut s) {
        Ok(parsed) => {
            r.final_schedule = Some(parsed.schedule);
            r.schedule_listing = Some(parsed.instance);
            r.listed_makespan = Some(parsed.makespan);
        }
        Err(e) => {
            r.diagnostics.push(format!("schedule: {e}"));
            return false;
        }
    }
    if let Err(e) = s.expect_end() {
        r.diagnostics.push(format!("after schedule: {e}"));
        return false;
    }
    true
}

fn parse_slow(text: &str, markers: &Markers, r: &mut ParsedResponse) -> bool {
    let final_block = match (text.find(&markers.reasoning_open), text.rfind(&markers.reasoning_close)) {
        (open, Some(close)) => {
            let from = open.map_or(0, |o| o + markers.reasoning_open.len());
            if open.is_none() {
                r.diagnostics.push(format!("missing {}", markers.reasoning_open));
            }
            if from <= close {
                r.reasoning = Some(text[from..close].to_string());
            }
            &text[close + markers.reasoning_close.len()..]
        }
        (open, None) => {
            // Without a closing delimiter the last final-task heading starts
            // the answer.
            let Some(at) = text.rfind(TaskHeading::New.text()) else {
                r.diagnostics.push(format!(
                    "missing {} and no '{}' block",
                    markers.reasoning_close,
                    TaskHeading::New
                ));
                return false;
            };
            r.diagnostics.push(format!("missing {}", markers.reasoning_close));
            let from = open.map_or(0, |o| o + markers.reasoning_open.len());
            if from <= at {
                r.reasoning = Some(text[from..at].to_string());
            }
            &text[at..]
        }
    };
    let mut s = Scanner::new(final_block);
    match scan_tasks(&mut s) {
        Ok((heading, inst)) => {
            if heading != TaskHeading::New {
                r.diagnostics.push(format!("final block is headed '{heading}'"));
            }
            r.final_tasks = Some(inst);
        }
        Err(e) => {
            r.diagnostics.push(format!("final block: {e}"));
            return false;
        }
    }
    if let Err(e) = s.expect_end() {
        r.diagnostics.push(format!("after final block: {e}"));
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn garbage() {
        let r = parse_model_output("I think the answer is 42.", Mode::Fast);
        assert!(!r.parse_ok);
        assert!(!r.diagnostics.is_empty());
    }

    #[test]
    fn fast_arithmetic_error() {
        let text = "The new tasks: J1: {(O1, M0, PT2)}The schedules of machine M0 are: {(J1, O1, 2, 0-3)}MakeSpan=3";
        let r = parse_model_output(text, Mode::Fast);
        assert!(!r.parse_ok);
        assert!(
            r.diagnostics.iter().any(|d| d.contains("0 + 2 != 3")),
            "{:?}",
            r.diagnostics
        );
        assert!(r.final_tasks.is_some());
    }

    #[test]
    fn fast_ok() {
        let text = "The new tasks: J1: {(O1, M0, PT2)}The schedules of machine M0 are: {(J1, O1, 2, 0-2)}MakeSpan=2";
        let r = parse_model_output(text, Mode::Fast);
        assert!(r.parse_ok, "{:?}", r.diagnostics);
        assert_eq!(r.listed_makespan, Some(2));
    }

    #[test]
    fn slow_with_markers() {
        let text = "[unused16]Job cancellation event: job J2 is cancelled.The current tasks: J1: {(O1, M0, PT2)}[unused17]The new tasks: J1: {(O1, M0, PT2)}";
        let r = parse_model_output(text, Mode::Slow);
        assert!(r.parse_ok, "{:?}", r.diagnostics);
        assert!(r.diagnostics.is_empty());
        assert!(r.reasoning.unwrap().starts_with("Job cancellation"));
    }

    #[test]
    fn slow_without_close_marker() {
        let text = "[unused16]Job cancellation event: job J2 is cancelled.The current tasks: J1: {(O1, M0, PT2)}The new tasks: J1: {(O1, M0, PT2)}";
        let r = parse_model_output(text, Mode::Slow);
        assert!(r.parse_ok);
        assert_eq!(r.final_tasks.unwrap().job_count(), 1);
    }
}
