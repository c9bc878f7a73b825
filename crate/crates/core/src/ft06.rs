//! The Fisher–Thompson 6×6 benchmark and a known optimal schedule for it.

use crate::events::DynamicEvent;
use crate::jsp::{Instance, JobLabel, OpId, Operation, Schedule, Time, Window};

/// FT06 in OR-library layout (0-based machines).
pub const FT06_ORLIB: &str = "6 6
2 1 0 3 1 6 3 7 5 3 4 6
1 8 2 5 4 10 5 10 0 10 3 4
2 5 3 4 5 8 0 9 1 1 4 7
1 5 0 5 2 5 3 3 4 8 5 9
2 9 1 3 4 5 5 4 0 3 3 1
1 3 3 3 5 9 0 10 4 4 2 1
";

pub const FT06_OPTIMUM: Time = 55;

const FT06_ROWS: [[(usize, Time); 6]; 6] = [
    [(2, 1), (0, 3), (1, 6), (3, 7), (5, 3), (4, 6)],
    [(1, 8), (2, 5), (4, 10), (5, 10), (0, 10), (3, 4)],
    [(2, 5), (3, 4), (5, 8), (0, 9), (1, 1), (4, 7)],
    [(1, 5), (0, 5), (2, 5), (3, 3), (4, 8), (5, 9)],
    [(2, 9), (1, 3), (4, 5), (5, 4), (0, 3), (3, 1)],
    [(1, 3), (3, 3), (5, 9), (0, 10), (4, 4), (2, 1)],
];

/// An optimal FT06 schedule listed machine by machine:
/// `((job, 1-based op), duration, start, end)`.
pub const BASELINE_LISTING: [((JobLabel, usize), Time, Time, Time); 36] = [
    // M0
    ((1, 2), 3, 6, 9),
    ((2, 5), 10, 38, 48),
    ((3, 4), 9, 18, 27),
    ((4, 2), 5, 13, 18),
    ((5, 5), 3, 48, 51),
    ((6, 4), 10, 28, 38),
    // M1
    ((1, 3), 6, 16, 22),
    ((2, 1), 8, 0, 8),
    ((3, 5), 1, 27, 28),
    ((4, 1), 5, 8, 13),
    ((5, 2), 3, 22, 25),
    ((6, 1), 3, 13, 16),
    // M2
    ((1, 1), 1, 5, 6),
    ((2, 2), 5, 8, 13),
    ((3, 1), 5, 0, 5),
    ((4, 3), 5, 22, 27),
    ((5, 1), 9, 13, 22),
    ((6, 6), 1, 49, 50),
    // M3
    ((1, 4), 7, 22, 29),
    ((2, 6), 4, 48, 52),
    ((3, 2), 4, 5, 9),
    ((4, 4), 3, 29, 32),
    ((5, 6), 1, 52, 53),
    ((6, 2), 3, 16, 19),
    // M4
    ((1, 6), 6, 49, 55),
    ((2, 3), 10, 13, 23),
    ((3, 6), 7, 30, 37),
    ((4, 5), 8, 37, 45),
    ((5, 3), 5, 25, 30),
    ((6, 5), 4, 45, 49),
    // M5
    ((1, 5), 3, 42, 45),
    ((2, 4), 10, 28, 38),
    ((3, 3), 8, 9, 17),
    ((4, 6), 9, 45, 54),
    ((5, 4), 4, 38, 42),
    ((6, 3), 9, 19, 28),
];

pub fn ft06() -> Instance {
    Instance::from_jobs(
        6,
        FT06_ROWS.iter().enumerate().map(|(j, row)| {
            (
                j as JobLabel + 1,
                row.iter().map(|&(m, d)| Operation::new(m, d)).collect(),
            )
        }),
    )
    .expect("FT06 table is well-formed")
}

pub fn baseline_schedule() -> Schedule {
    BASELINE_LISTING
        .iter()
        .map(|&((job, op), _, start, _)| (OpId::new(job, op - 1), start))
        .collect()
}

/// Five events on FT06: two processing-time changes, two machine changes and
/// a maintenance window on M1.
pub fn five_event_sequence() -> Vec<DynamicEvent> {
    vec![
        DynamicEvent::ProcessingTimeChange {
            job: 3,
            op: 0,
            old_pt: 5,
            new_pt: 10,
        },
        DynamicEvent::ProcessingTimeChange {
            job: 4,
            op: 2,
            old_pt: 5,
            new_pt: 9,
        },
        DynamicEvent::MachineChange {
            job: 5,
            op: 0,
            old_machine: 2,
            new_machine: 0,
        },
        DynamicEvent::MachineChange {
            job: 6,
            op: 5,
            old_machine: 2,
            new_machine: 0,
        },
        DynamicEvent::MachineMaintenance {
            machine: 1,
            window: Window { start: 8, end: 11 },
        },
    ]
}
