use std::fmt::Write;

use crate::jsp::{Instance, JobLabel, Operation};

use super::scan::ParseError;
use super::FormatError;

/// `n m` header, then one line per job of `m` (machine, duration) pairs.
/// Blank lines and lines starting with `#` are skipped. Jobs are labelled
/// `1..=n`.
pub fn parse_orlib(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .scan(0usize, |offset, line| {
            let at = *offset;
            *offset += line.len() + 1;
            Some((at, line.trim()))
        })
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (at, header) = lines.next().ok_or_else(|| ParseError::new(0, "missing 'n m' header"))?;
    let dims = parse_ints(at, header)?;
    let [n, m] = dims[..] else {
        return Err(ParseError::new(
            at,
            format!("header needs 2 numbers, found {}", dims.len()),
        ));
    };
    let (n, m) = (non_negative(at, n)?, non_negative(at, m)?);

    let mut jobs = Vec::with_capacity(n);
    for j in 0..n {
        let (at, line) = lines
            .next()
            .ok_or_else(|| ParseError::new(text.len(), format!("expected {n} job lines, found {j}")))?;
        let nums = parse_ints(at, line)?;
        if nums.len() != 2 * m {
            return Err(ParseError::new(
                at,
                format!("job line {} needs {} numbers, found {}", j + 1, 2 * m, nums.len()),
            ));
        }
        let mut ops = Vec::with_capacity(m);
        for pair in nums.chunks(2) {
            let machine = non_negative(at, pair[0])?;
            if machine >= m {
                return Err(ParseError::new(
                    at,
                    format!("machine {machine} out of range for m = {m}"),
                ));
            }
            ops.push(Operation::new(machine, pair[1]));
        }
        jobs.push((j as JobLabel + 1, ops));
    }
    if let Some((at, _)) = lines.next() {
        return Err(ParseError::new(at, format!("more than {n} job lines")));
    }
    Instance::from_jobs(m, jobs).map_err(|e| ParseError::new(0, e.to_string()))
}

/// Inverse of [`parse_orlib`]. Needs jobs labelled `1..=n`, each with exactly
/// `machine_count` operations, and no maintenance.
pub fn format_orlib(instance: &Instance) -> Result<String, FormatError> {
    if !instance.maintenance().is_empty() {
        return Err(FormatError::NotOrlib(
            "maintenance windows cannot be represented".into(),
        ));
    }
    let m = instance.machine_count();
    let mut out = format!("{} {}\n", instance.job_count(), m);
    for (expected, (&job, ops)) in (1..).zip(instance.jobs()) {
        if job != expected {
            return Err(FormatError::NotOrlib(format!("job labels must be 1..n, found J{job}")));
        }
        if ops.len() != m {
            return Err(FormatError::NotOrlib(format!(
                "J{job} has {} operations, expected {m}",
                ops.len()
            )));
        }
        let pairs: Vec<String> = ops.iter().map(|op| format!("{} {}", op.machine, op.duration)).collect();
        writeln!(out, "{}", pairs.join(" ")).unwrap();
    }
    Ok(out)
}

fn parse_ints(at: usize, line: &str) -> Result<Vec<i64>, ParseError> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| ParseError::new(at, format!("'{t}' is not an integer")))
        })
        .collect()
}

fn non_negative(at: usize, v: i64) -> Result<usize, ParseError> {
    usize::try_from(v).map_err(|_| ParseError::new(at, format!("{v} must be non-negative")))
}
