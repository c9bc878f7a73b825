use std::collections::BTreeMap;
use std::fmt::Write;

use crate::jsp::{completion_times, validate, Instance, JobLabel, MachineId, OpId, Operation, Schedule, Time};

use super::scan::{PResult, ParseError, Scanner};
use super::FormatError;

pub(crate) const SEGMENT_HEAD: &str = "The schedules of machine";

/// Schedule text recovered by [`parse_schedule_text`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleText {
    /// Jobs and machines as listed; no maintenance. `machine_count` is one
    /// past the highest machine segment.
    pub instance: Instance,
    pub schedule: Schedule,
    pub makespan: Time,
}

/// One segment per machine `0..machine_count`, tuples in `(job, op)` order,
/// then `MakeSpan=`. Refuses schedules that do not validate.
pub fn format_schedule_text(instance: &Instance, schedule: &Schedule) -> Result<String, FormatError> {
    let report = validate(instance, schedule);
    if let Some(v) = report.violations.first() {
        return Err(FormatError::InvalidSchedule(format!("{}: {}", v.kind, v.detail)));
    }
    let ends = completion_times(instance, schedule).map_err(|e| FormatError::InvalidSchedule(e.to_string()))?;
    let mut per_machine: Vec<Vec<String>> = vec![Vec::new(); instance.machine_count()];
    for (id, op) in instance.operations() {
        let start = schedule.start(id).expect("validated");
        per_machine[op.machine].push(format!(
            "(J{}, O{}, {}, {}-{})",
            id.job,
            id.op + 1,
            op.duration,
            start,
            ends[&id]
        ));
    }
    let mut out = String::new();
    for (m, tuples) in per_machine.iter().enumerate() {
        write!(out, "{SEGMENT_HEAD} M{m} are: {{{}}}", tuples.join(",")).unwrap();
    }
    let c = ends.values().copied().max().unwrap_or(0);
    write!(out, "MakeSpan={c}").unwrap();
    Ok(out)
}

pub fn parse_schedule_text(text: &str) -> Result<ScheduleText, ParseError> {
    let mut s = Scanner::new(text);
    let parsed = scan_schedule(&mut s)?;
    s.expect_end()?;
    Ok(parsed)
}

struct Tuple {
    at: usize,
    job: JobLabel,
    op: usize,
    duration: Time,
    start: Time,
}

pub(crate) fn scan_schedule(s: &mut Scanner) -> PResult<ScheduleText> {
    let mut listed: BTreeMap<OpId, (MachineId, Time, Time)> = BTreeMap::new();
    let mut seen_machines = std::collections::BTreeSet::new();
    let mut segments = 0usize;
    while s.peek(SEGMENT_HEAD) {
        s.expect(SEGMENT_HEAD)?;
        let at = s.pos();
        let machine = s.prefixed("M")? as MachineId;
        if !seen_machines.insert(machine) {
            return Err(ParseError::new(at, format!("machine M{machine} listed twice")));
        }
        s.expect("are:")?;
        let tuples = s.list("{", "}", scan_tuple)?;
        for t in tuples {
            let id = OpId::new(t.job, t.op);
            if listed.insert(id, (machine, t.duration, t.start)).is_some() {
                return Err(ParseError::new(t.at, format!("{id} listed twice")));
            }
        }
        segments += 1;
    }
    if segments == 0 {
        return Err(s.error(format!("expected '{SEGMENT_HEAD}'")));
    }
    s.expect("MakeSpan =")?;
    let at = s.pos();
    let makespan = s.int()?;

    let mut jobs: BTreeMap<JobLabel, Vec<Operation>> = BTreeMap::new();
    let mut schedule = Schedule::new();
    for (&id, &(machine, duration, start)) in &listed {
        let ops = jobs.entry(id.job).or_default();
        if ops.len() != id.op {
            let missing = OpId::new(id.job, ops.len());
            return Err(ParseError::new(at, format!("{missing} is missing from the listing")));
        }
        ops.push(Operation::new(machine, duration));
        schedule.insert(id, start);
    }
    let machine_count = seen_machines.last().map_or(0, |m| m + 1);
    let instance = Instance::from_jobs(machine_count, jobs).map_err(|e| ParseError::new(at, e.to_string()))?;
    let actual = listed.values().map(|&(_, d, st)| st + d).max().unwrap_or(0);
    if actual != makespan {
        return Err(ParseError::new(
            at,
            format!("MakeSpan={makespan} but the latest listed end is {actual}"),
        ));
    }
    Ok(ScheduleText {
        instance,
        schedule,
        makespan,
    })
}

fn scan_tuple(s: &mut Scanner) -> PResult<Tuple> {
    s.expect("(")?;
    s.skip_ws();
    let at = s.pos();
    let job = s.prefixed("J")?;
    let job = JobLabel::try_from(job)
        .ok()
        .filter(|&j| j > 0)
        .ok_or_else(|| ParseError::new(at, "job label must be positive"))?;
    s.expect(",")?;
    s.skip_ws();
    let op_at = s.pos();
    let op = s.prefixed("O")?;
    if op < 1 {
        return Err(ParseError::new(op_at, "operation index must start at 1"));
    }
    s.expect(",")?;
    let duration = s.int()?;
    s.expect(",")?;
    let start = s.int()?;
    s.expect("-")?;
    let end = s.int()?;
    s.expect(")")?;
    if duration < 1 {
        return Err(ParseError::new(
            at,
            format!("J{job}.O{op}: processing time must be positive"),
        ));
    }
    if start + duration != end {
        return Err(ParseError::new(
            at,
            format!("J{job}.O{op}: {start} + {duration} != {end}"),
        ));
    }
    Ok(Tuple {
        at,
        job,
        op: op as usize - 1,
        duration,
        start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ft06;

    #[test]
    fn single_op() {
        let inst = Instance::from_jobs(1, [(1, vec![Operation::new(0, 2)])]).unwrap();
        let sched: Schedule = [(OpId::new(1, 0), 0)].into_iter().collect();
        let text = format_schedule_text(&inst, &sched).unwrap();
        assert_eq!(text, "The schedules of machine M0 are: {(J1, O1, 2, 0-2)}MakeSpan=2");
        let back = parse_schedule_text(&text).unwrap();
        assert_eq!(back.instance, inst);
        assert_eq!(back.schedule, sched);
        assert_eq!(back.makespan, 2);
    }

    #[test]
    fn ft06_baseline_prefix() {
        let text = format_schedule_text(&ft06::ft06(), &ft06::baseline_schedule()).unwrap();
        assert!(text.starts_with("The schedules of machine M0 are: {(J1, O2, 3, 6-9),"));
        assert!(text.ends_with("}MakeSpan=55"));
        let back = parse_schedule_text(&text).unwrap();
        assert_eq!(back.schedule.len(), 36);
        assert_eq!(back.makespan, 55);
    }

    #[test]
    fn bad_arithmetic() {
        let err = parse_schedule_text("The schedules of machine M0 are: {(J1, O1, 2, 0-3)}MakeSpan=3").unwrap_err();
        assert!(err.message.contains("0 + 2 != 3"), "{err}");
    }

    #[test]
    fn empty_segment() {
        let back = parse_schedule_text("The schedules of machine M0 are: {}MakeSpan=0").unwrap();
        assert!(back.schedule.is_empty());
        assert_eq!(back.instance.machine_count(), 1);
    }

    #[test]
    fn makespan_mismatch() {
        assert!(parse_schedule_text("The schedules of machine M0 are: {(J1, O1, 2, 0-2)}MakeSpan=3").is_err());
    }

    #[test]
    fn gap_in_ops() {
        let err = parse_schedule_text("The schedules of machine M0 are: {(J1, O2, 2, 0-2)}MakeSpan=2").unwrap_err();
        assert!(err.message.contains("J1.O1"), "{err}");
    }

    #[test]
    fn refuses_invalid() {
        let mut sched = ft06::baseline_schedule();
        sched.insert(OpId::new(1, 1), 4);
        assert!(matches!(
            format_schedule_text(&ft06::ft06(), &sched),
            Err(FormatError::InvalidSchedule(_))
        ));
    }
}
