use crate::events::DynamicEvent;
use crate::jsp::{MachineId, Time, Window};

use super::scan::{PResult, ParseError, Scanner};
use super::tasks::{format_op_list, scan_job_label, scan_op_list};

const TC_HEAD: &str = "Processing time change event:";
const MC_HEAD: &str = "Processing machine change event:";
const MM_HEAD: &str = "Machine maintenance event:";
// No published wording exists for these two; same register as the others.
const JC_HEAD: &str = "Job cancellation event:";
const JI_HEAD: &str = "Job insertion event:";

/// One sentence ending in `.`; machines in change events are bare integers.
pub fn format_event_text(event: &DynamicEvent) -> String {
    match event {
        DynamicEvent::ProcessingTimeChange {
            job,
            op,
            old_pt,
            new_pt,
        } => format!(
            "{TC_HEAD} the processing time of operation O{} belonging to job J{job} is updated from {old_pt} to {new_pt}.",
            op + 1
        ),
        DynamicEvent::MachineChange {
            job,
            op,
            old_machine,
            new_machine,
        } => format!(
            "{MC_HEAD} the processing machine of operation O{} belonging to job J{job} is updated from {old_machine} to {new_machine}.",
            op + 1
        ),
        DynamicEvent::MachineMaintenance { machine, window } => format!(
            "{MM_HEAD} the unavailable duration of machine M{machine} is: [{}, {}].",
            window.start, window.end
        ),
        DynamicEvent::JobCancellation { job } => format!("{JC_HEAD} job J{job} is cancelled."),
        DynamicEvent::JobInsertion { job, ops } => format!(
            "{JI_HEAD} a new job J{job} is inserted with operations: {}.",
            format_op_list(ops)
        ),
    }
}

pub fn parse_event_text(text: &str) -> Result<DynamicEvent, ParseError> {
    let mut s = Scanner::new(text);
    let event = scan_event(&mut s)?;
    s.expect_end()?;
    Ok(event)
}

pub(crate) fn starts_event(s: &mut Scanner) -> bool {
    [TC_HEAD, MC_HEAD, MM_HEAD, JC_HEAD, JI_HEAD].iter().any(|h| s.peek(h))
}

/// Zero or more consecutive event sentences.
pub(crate) fn scan_events(s: &mut Scanner) -> PResult<Vec<DynamicEvent>> {
    let mut out = Vec::new();
    while starts_event(s) {
        out.push(scan_event(s)?);
    }
    Ok(out)
}

pub(crate) fn scan_event(s: &mut Scanner) -> PResult<DynamicEvent> {
    if s.eat(TC_HEAD) {
        s.expect("the processing time of operation")?;
        let (job, op) = scan_op_ref(s)?;
        s.expect("is updated from")?;
        let old_pt = s.int()?;
        s.expect("to")?;
        let new_pt = s.int()?;
        s.expect(".")?;
        Ok(DynamicEvent::ProcessingTimeChange {
            job,
            op,
            old_pt,
            new_pt,
        })
    } else if s.eat(MC_HEAD) {
        s.expect("the processing machine of operation")?;
        let (job, op) = scan_op_ref(s)?;
        s.expect("is updated from")?;
        let old_machine = s.usize()?;
        s.expect("to")?;
        let new_machine = s.usize()?;
        s.expect(".")?;
        Ok(DynamicEvent::MachineChange {
            job,
            op,
            old_machine,
            new_machine,
        })
    } else if s.eat(MM_HEAD) {
        s.expect("the unavailable duration of machine")?;
        let machine = s.prefixed("M")? as MachineId;
        s.expect("is: [")?;
        s.skip_ws();
        let at = s.pos();
        let start: Time = s.int()?;
        s.expect(",")?;
        let end: Time = s.int()?;
        s.expect("] .")?;
        let window = Window::new(start, end).map_err(|e| ParseError::new(at, e.to_string()))?;
        Ok(DynamicEvent::MachineMaintenance { machine, window })
    } else if s.eat(JC_HEAD) {
        s.expect("job")?;
        let job = scan_job_label(s)?;
        s.expect("is cancelled.")?;
        Ok(DynamicEvent::JobCancellation { job })
    } else if s.eat(JI_HEAD) {
        s.expect("a new job")?;
        let job = scan_job_label(s)?;
        s.expect("is inserted with operations:")?;
        let ops = scan_op_list(s)?;
        s.expect(".")?;
        Ok(DynamicEvent::JobInsertion { job, ops })
    } else {
        s.skip_ws();
        let snippet: String = s.rest().chars().take(32).collect();
        Err(s.error(format!("unknown event sentence '{snippet}'")))
    }
}

/// `O{k} belonging to job J{j}`; returns the 0-based op index.
fn scan_op_ref(s: &mut Scanner) -> PResult<(crate::jsp::JobLabel, usize)> {
    s.skip_ws();
    let at = s.pos();
    let k = s.prefixed("O")?;
    if k < 1 {
        return Err(ParseError::new(at, "operation index must start at 1"));
    }
    s.expect("belonging to job")?;
    let job = scan_job_label(s)?;
    Ok((job, k as usize - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ft06;
    use crate::jsp::Operation;

    #[test]
    fn reference_sentences() {
        let texts: Vec<String> = ft06::five_event_sequence().iter().map(format_event_text).collect();
        assert_eq!(
            texts[0],
            "Processing time change event: the processing time of operation O1 belonging to job J3 is updated from 5 to 10."
        );
        assert_eq!(
            texts[3],
            "Processing machine change event: the processing machine of operation O6 belonging to job J6 is updated from 2 to 0."
        );
        assert_eq!(
            texts[4],
            "Machine maintenance event: the unavailable duration of machine M1 is: [8, 11]."
        );
    }

    #[test]
    fn round_trip_all_kinds() {
        let mut events = ft06::five_event_sequence();
        events.push(DynamicEvent::JobCancellation { job: 4 });
        events.push(DynamicEvent::JobInsertion {
            job: 7,
            ops: vec![Operation::new(1, 3), Operation::new(0, 2)],
        });
        for e in events {
            assert_eq!(parse_event_text(&format_event_text(&e)).unwrap(), e);
        }
    }

    #[test]
    fn unknown_template() {
        assert!(parse_event_text("Machine breakdown event: M1 is down.").is_err());
    }

    #[test]
    fn consecutive_sentences() {
        let joined: Vec<String> = ft06::five_event_sequence().iter().map(format_event_text).collect();
        let text = joined.join(" ");
        let mut s = Scanner::new(&text);
        assert_eq!(scan_events(&mut s).unwrap(), ft06::five_event_sequence());
        assert!(s.at_end());
    }
}
