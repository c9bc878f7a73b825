use std::collections::BTreeMap;
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::jsp::{Instance, JobLabel, MachineId, Operation, Window};

use super::scan::{PResult, ParseError, Scanner};

pub(crate) const INTERVALS_HEAD: &str = "The unavailable intervals of machines:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskHeading {
    /// Intermediate state inside a reasoning trace.
    Current,
    /// Final state.
    New,
}

impl TaskHeading {
    pub fn text(self) -> &'static str {
        match self {
            TaskHeading::Current => "The current tasks",
            TaskHeading::New => "The new tasks",
        }
    }
}

impl fmt::Display for TaskHeading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

pub(crate) fn format_op_list(ops: &[Operation]) -> String {
    let items: Vec<String> = ops
        .iter()
        .enumerate()
        .map(|(k, op)| format!("(O{}, M{}, PT{})", k + 1, op.machine, op.duration))
        .collect();
    format!("{{{}}}", items.join(", "))
}

pub fn format_tasks_text(instance: &Instance, heading: TaskHeading) -> String {
    let mut out = format!("{heading}:");
    for (job, ops) in instance.jobs() {
        write!(out, " J{job}: {}", format_op_list(ops)).unwrap();
    }
    if !instance.maintenance().is_empty() {
        out.push_str(INTERVALS_HEAD);
        for (m, windows) in instance.maintenance() {
            let items: Vec<String> = windows.iter().map(|w| format!("({}, {})", w.start, w.end)).collect();
            write!(out, " M{m}: [{}]", items.join(", ")).unwrap();
        }
    }
    out
}

/// Parse a task block under either heading. `machine_count` is one past the
/// highest machine mentioned.
pub fn parse_tasks_text(text: &str) -> Result<Instance, ParseError> {
    let mut s = Scanner::new(text);
    let (_, instance) = scan_tasks(&mut s)?;
    s.expect_end()?;
    Ok(instance)
}

pub(crate) fn scan_heading(s: &mut Scanner) -> PResult<TaskHeading> {
    for heading in [TaskHeading::Current, TaskHeading::New] {
        if s.eat(&format!("{heading}:")) {
            return Ok(heading);
        }
    }
    s.skip_ws();
    Err(s.error("expected 'The current tasks:' or 'The new tasks:'"))
}

pub(crate) fn scan_tasks(s: &mut Scanner) -> PResult<(TaskHeading, Instance)> {
    let heading = scan_heading(s)?;
    let at = s.pos();
    let jobs = scan_jobs(s)?;
    let mut maintenance: BTreeMap<MachineId, Vec<Window>> = BTreeMap::new();
    if s.eat(INTERVALS_HEAD) {
        while s.peek_prefixed("M") {
            s.skip_ws();
            let m_at = s.pos();
            let machine = s.prefixed("M")? as MachineId;
            s.expect(":")?;
            let windows = s.list("[", "]", scan_window)?;
            if maintenance.insert(machine, windows).is_some() {
                return Err(ParseError::new(m_at, format!("machine M{machine} listed twice")));
            }
        }
    }
    let machine_count = jobs
        .values()
        .flatten()
        .map(|op| op.machine)
        .chain(maintenance.keys().copied())
        .max()
        .map_or(0, |m| m + 1);
    let instance = Instance::new(machine_count, jobs, maintenance).map_err(|e| ParseError::new(at, e.to_string()))?;
    Ok((heading, instance))
}

/// Zero or more `J{j}: {...}` entries.
pub(crate) fn scan_jobs(s: &mut Scanner) -> PResult<BTreeMap<JobLabel, Vec<Operation>>> {
    let mut jobs = BTreeMap::new();
    while s.peek_prefixed("J") {
        s.skip_ws();
        let at = s.pos();
        let job = scan_job_label(s)?;
        s.expect(":")?;
        let ops = scan_op_list(s)?;
        if jobs.insert(job, ops).is_some() {
            return Err(ParseError::new(at, format!("job J{job} listed twice")));
        }
    }
    Ok(jobs)
}

pub(crate) fn scan_job_label(s: &mut Scanner) -> PResult<JobLabel> {
    s.skip_ws();
    let at = s.pos();
    let job = s.prefixed("J")?;
    JobLabel::try_from(job)
        .ok()
        .filter(|&j| j > 0)
        .ok_or_else(|| ParseError::new(at, "job label must be a positive integer"))
}

/// `{(O1, M{m}, PT{p}), ...}` with contiguous indices from O1.
pub(crate) fn scan_op_list(s: &mut Scanner) -> PResult<Vec<Operation>> {
    let mut k = 0usize;
    s.list("{", "}", |s| {
        s.expect("(")?;
        s.skip_ws();
        let at = s.pos();
        let idx = s.prefixed("O")?;
        k += 1;
        if idx != k as i64 {
            return Err(ParseError::new(at, format!("expected O{k}, found O{idx}")));
        }
        s.expect(",")?;
        let machine = s.prefixed("M")? as MachineId;
        s.expect(",")?;
        s.skip_ws();
        let pt_at = s.pos();
        let duration = s.prefixed("PT")?;
        if duration < 1 {
            return Err(ParseError::new(pt_at, "processing time must be positive"));
        }
        s.expect(")")?;
        Ok(Operation::new(machine, duration))
    })
}

fn scan_window(s: &mut Scanner) -> PResult<Window> {
    s.expect("(")?;
    s.skip_ws();
    let at = s.pos();
    let start = s.int()?;
    s.expect(",")?;
    let end = s.int()?;
    s.expect(")")?;
    Window::new(start, end).map_err(|e| ParseError::new(at, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::events::run_processor;
    use crate::ft06;

    #[test]
    fn final_ft06_block() {
        let trace = run_processor(&ft06::ft06(), &ft06::five_event_sequence()).unwrap();
        let text = format_tasks_text(&trace.final_state, TaskHeading::New);
        assert!(text.starts_with("The new tasks: J1: {(O1, M2, PT1), "));
        assert!(text.contains("J3: {(O1, M2, PT10), (O2, M3, PT4), "));
        assert!(text.ends_with("}The unavailable intervals of machines: M1: [(8, 11)]"));
        let back = parse_tasks_text(&text).unwrap();
        assert!(back.same_tasks(&trace.final_state));
        assert_eq!(back.job_count(), 6);
        assert_eq!(back.windows(1), &[Window { start: 8, end: 11 }]);
    }

    #[test]
    fn empty_instance_is_heading_only() {
        assert_eq!(
            format_tasks_text(&Instance::empty(), TaskHeading::New),
            "The new tasks:"
        );
        assert_eq!(parse_tasks_text("The new tasks:").unwrap().job_count(), 0);
    }

    #[test]
    fn single_job() {
        let inst = parse_tasks_text("The current tasks: J1: {(O1, M0, PT5)}").unwrap();
        assert_eq!(inst.job(1), Some(&[Operation::new(0, 5)][..]));
    }

    #[test]
    fn must_start_at_o1() {
        let err = parse_tasks_text("The new tasks: J1: {(O2, M0, PT5)}").unwrap_err();
        assert!(err.message.contains("expected O1"), "{err}");
    }

    #[test]
    fn duplicate_job() {
        assert!(parse_tasks_text("The new tasks: J1: {(O1, M0, PT5)} J1: {(O1, M0, PT2)}").is_err());
    }

    #[test]
    fn bad_interval() {
        assert!(parse_tasks_text(
            "The new tasks: J1: {(O1, M0, PT5)}The unavailable intervals of machines: M0: [(4, 4)]"
        )
        .is_err());
    }
}
