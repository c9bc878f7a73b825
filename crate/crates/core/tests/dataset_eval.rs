mod common;

use std::time::Duration;

use djsp_core::datasetgen::{generate_dataset, generate_to_writer, make_record, DatasetRecord, GenConfig};
use djsp_core::eval::{check_feasibility, check_optimality, evaluate_responses, Optimality};
use djsp_core::events::{run_processor, sample_scenario, EventCategory, SamplingConfig};
use djsp_core::judge::{classify_mode, Mode};
use djsp_core::solver::{solve_exact, SolveStatus};
use djsp_core::textio::{
    build_target, format_schedule_text, format_tasks_text, parse_model_output, FastPolicy, TaskHeading,
};
use djsp_core::{local_repair, Scenario};

const LIMIT: Duration = Duration::from_secs(30);

fn records(mode: Mode, count: usize, seed: u64) -> Vec<DatasetRecord> {
    let mut buf = Vec::new();
    let summary = generate_to_writer(&GenConfig::new(mode, count, seed), &mut buf).unwrap();
    assert_eq!(summary.written + summary.skipped, count);
    String::from_utf8(buf)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn fast_records() {
    let recs = records(Mode::Fast, 100, 3);
    assert_eq!(recs.len(), 100);
    for r in &recs {
        assert_eq!(r.meta.event_summary.total(), 1);
        assert!(r.input.ends_with(" /no_think"));
        let sc = r.scenario().unwrap();
        assert_eq!(classify_mode(&sc.events).unwrap(), Mode::Fast);
        let parsed = parse_model_output(&r.output, Mode::Fast);
        assert!(parsed.parse_ok, "{:?}", parsed.diagnostics);
        let fe = check_feasibility(&sc, &parsed);
        assert!(fe.feasible, "{:?}", fe.reason);
        assert_eq!(fe.makespan, Some(r.meta.final_optimal_makespan));
    }
}

#[test]
fn slow_records() {
    for r in records(Mode::Slow, 100, 4) {
        let s = r.meta.event_summary;
        assert!(s.total() >= 2);
        assert!(s.count(EventCategory::ProcessingTimeChange) >= 1);
        assert!(s.count(EventCategory::MachineChange) >= 1);
        assert!(r.output.contains("[unused16]") && r.output.contains("[unused17]"));
        let sc = r.scenario().unwrap();
        let parsed = parse_model_output(&r.output, Mode::Slow);
        let tasks = parsed.final_tasks.clone().unwrap();
        assert!(tasks.same_tasks(&run_processor(&sc.baseline, &sc.events).unwrap().final_state));
        let resolved = solve_exact(&tasks, LIMIT);
        assert_eq!(resolved.status, SolveStatus::Optimal);
        assert_eq!(resolved.makespan, r.meta.final_optimal_makespan);
        assert_eq!(check_optimality(&sc, &parsed), Some(Optimality::Optimal));
    }
}

#[test]
fn generation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
    let c = GenConfig::new(Mode::Slow, 20, 99);
    generate_dataset(&c, &a).unwrap();
    generate_dataset(&c, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(make_record(&c, 5).unwrap(), make_record(&c, 5).unwrap());
}

fn fast_scenarios(n: u64) -> Vec<Scenario> {
    (0..n)
        .map(|s| sample_scenario(&SamplingConfig::new(Mode::Fast), 1000 + s).unwrap())
        .collect()
}

#[test]
fn exact_responses_score_full_marks() {
    let scs = fast_scenarios(40);
    let responses: Vec<_> = scs
        .iter()
        .map(|sc| {
            parse_model_output(
                &build_target(sc, FastPolicy::ExactResolve, LIMIT).unwrap().text,
                Mode::Fast,
            )
        })
        .collect();
    let report = evaluate_responses(&scs, &responses).unwrap();
    assert_eq!((report.feasible, report.optimal), (40, 40));
    assert_eq!(report.feasibility_percent(), "100.00%");
    assert_eq!(report.mean_gap, Some(0.0));
}

#[test]
fn repair_responses_are_feasible_and_stable() {
    let scs = fast_scenarios(40);
    let responses: Vec<_> = scs
        .iter()
        .map(|sc| {
            parse_model_output(
                &build_target(sc, FastPolicy::LocalRepair, LIMIT).unwrap().text,
                Mode::Fast,
            )
        })
        .collect();
    let report = evaluate_responses(&scs, &responses).unwrap();
    assert_eq!(report.feasible, 40);
    assert!(report.optimal <= 40);
    assert!(report.per_scenario.iter().all(|r| r.moved_unaffected == Some(0)));
}

#[test]
fn garbage_scores_zero() {
    let scs = fast_scenarios(5);
    let responses: Vec<_> = (0..5).map(|_| parse_model_output("no idea", Mode::Fast)).collect();
    let report = evaluate_responses(&scs, &responses).unwrap();
    assert_eq!((report.parsed, report.feasible, report.optimal), (0, 0, 0));
    assert_eq!(report.optimality_percent(), "0.00%");
}

#[test]
fn overlap_is_rejected_with_reason() {
    let sc = fast_scenarios(1).remove(0);
    let r = local_repair(&sc).unwrap();
    let mut sched = r.schedule.clone();
    // Put a second op of the same machine at the same start as another.
    let (a, b) = r
        .instance
        .operations()
        .flat_map(|(x, ox)| {
            r.instance
                .operations()
                .map(move |(y, oy)| (x, ox.machine, y, oy.machine))
        })
        .find(|&(x, mx, y, my)| x < y && mx == my && x.job != y.job)
        .map(|(x, _, y, _)| (x, y))
        .unwrap();
    sched.insert(b, sched.start(a).unwrap());
    let tasks = format_tasks_text(&r.instance, TaskHeading::New);
    // Format through the listing by hand since the formatter refuses infeasible schedules.
    let mut listing = String::new();
    let mut by_machine: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
    for m in 0..r.instance.machine_count() {
        by_machine.insert(m, Vec::new());
    }
    for (id, op) in r.instance.operations() {
        let s = sched.start(id).unwrap();
        by_machine.get_mut(&op.machine).unwrap().push(format!(
            "(J{}, O{}, {}, {}-{})",
            id.job,
            id.op + 1,
            op.duration,
            s,
            s + op.duration
        ));
    }
    let mut end = 0;
    for (id, op) in r.instance.operations() {
        end = end.max(sched.start(id).unwrap() + op.duration);
    }
    for (m, tuples) in by_machine {
        listing.push_str(&format!("The schedules of machine M{m} are: {{{}}}", tuples.join(",")));
    }
    listing.push_str(&format!("MakeSpan={end}"));
    let parsed = parse_model_output(&format!("{tasks}{listing}"), Mode::Fast);
    assert!(parsed.parse_ok, "{:?}", parsed.diagnostics);
    let fe = check_feasibility(&sc, &parsed);
    assert!(!fe.feasible);
    assert!(fe.reason.unwrap().contains("overlap: "));
    assert!(format_schedule_text(&r.instance, &sched).is_err());
}
