mod common;

use std::time::Duration;

use djsp_core::events::{DynamicEvent, EventCategory};
use djsp_core::solver::solve_exact;
use djsp_core::textio::{
    format_event_text, format_orlib, format_schedule_text, format_tasks_text, parse_event_text, parse_orlib,
    parse_schedule_text, parse_tasks_text, TaskHeading,
};
use djsp_core::{Operation, Window};
use rand::Rng;

const LIMIT: Duration = Duration::from_secs(30);

#[test]
fn schedule_text_round_trips() {
    for seed in 0..200 {
        let mut inst = common::small_instance(seed, 5, 4);
        if seed % 3 == 0 {
            inst = common::with_random_window(&inst, seed);
        }
        let sched = solve_exact(&inst, LIMIT).schedule;
        let text = format_schedule_text(&inst, &sched).unwrap();
        let back = parse_schedule_text(&text).unwrap();
        assert_eq!(back.schedule, sched, "seed {seed}");
        assert_eq!(back.instance.jobs(), inst.jobs(), "seed {seed}");
        assert_eq!(back.instance.machine_count(), inst.machine_count());
        assert_eq!(format_schedule_text(&back.instance, &back.schedule).unwrap(), text);
    }
}

#[test]
fn tasks_text_round_trips() {
    for seed in 0..200 {
        let mut inst = common::ragged_instance(seed, 6, 6, 6);
        if seed % 2 == 0 {
            inst = common::with_random_window(&inst, seed);
        }
        for heading in [TaskHeading::Current, TaskHeading::New] {
            let text = format_tasks_text(&inst, heading);
            let back = parse_tasks_text(&text).unwrap();
            assert!(back.same_tasks(&inst), "seed {seed}");
            assert_eq!(format_tasks_text(&back, heading), text);
        }
    }
}

fn random_event(seed: u64, category: EventCategory) -> DynamicEvent {
    let mut r = common::rng(seed);
    let job = r.gen_range(1..=50);
    let op = r.gen_range(0..10);
    match category {
        EventCategory::JobCancellation => DynamicEvent::JobCancellation { job },
        EventCategory::ProcessingTimeChange => DynamicEvent::ProcessingTimeChange {
            job,
            op,
            old_pt: r.gen_range(1..100),
            new_pt: r.gen_range(1..100),
        },
        EventCategory::MachineChange => DynamicEvent::MachineChange {
            job,
            op,
            old_machine: r.gen_range(0..20),
            new_machine: r.gen_range(0..20),
        },
        EventCategory::JobInsertion => DynamicEvent::JobInsertion {
            job,
            ops: (0..r.gen_range(1..8))
                .map(|_| Operation::new(r.gen_range(0..10), r.gen_range(1..20)))
                .collect(),
        },
        EventCategory::MachineMaintenance => {
            let start = r.gen_range(0..200);
            DynamicEvent::MachineMaintenance {
                machine: r.gen_range(0..10),
                window: Window::new(start, start + r.gen_range(1..10)).unwrap(),
            }
        }
    }
}

#[test]
fn event_text_round_trips() {
    for category in EventCategory::ALL {
        for seed in 0..100 {
            let e = random_event(seed, category);
            assert_eq!(parse_event_text(&format_event_text(&e)).unwrap(), e);
        }
    }
}

#[test]
fn orlib_round_trips() {
    for seed in 0..200 {
        let inst = common::small_instance(seed, 8, 8);
        let text = format_orlib(&inst).unwrap();
        assert_eq!(parse_orlib(&text).unwrap(), inst);
    }
}

#[test]
fn parsers_tolerate_whitespace() {
    let inst = parse_tasks_text("The new tasks:\n  J1: { (O1, M0, PT5) ,(O2,M1,PT2)}\nThe unavailable intervals of machines:\n M1: [ (3 , 4) ]\n").unwrap();
    assert_eq!(inst.operation_count(), 2);
    assert_eq!(inst.windows(1), &[Window::new(3, 4).unwrap()]);
    let s = parse_schedule_text(
        "The schedules of machine M0 are: {(J1, O1, 2, 0-2)}\nThe schedules of machine M1 are: {}\nMakeSpan = 2\n",
    )
    .unwrap();
    assert_eq!(s.instance.machine_count(), 2);
}

#[test]
fn formatting_is_deterministic() {
    let inst = common::with_random_window(&common::small_instance(9, 4, 4), 9);
    let sched = solve_exact(&inst, LIMIT).schedule;
    assert_eq!(
        format_schedule_text(&inst, &sched).unwrap(),
        format_schedule_text(&inst.clone(), &sched.clone()).unwrap()
    );
}
