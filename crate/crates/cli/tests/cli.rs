use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn djsp() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_djsp"));
    c.env_remove("DJSP_TIME_LIMIT_SECS");
    c
}

fn ft06_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ft06.txt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value<'a>(out: &'a str, key: &str) -> &'a str {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no '{key}' in {out}"))
}

#[test]
fn solve_ft06() {
    let o = djsp().arg("solve").arg(ft06_path()).output().unwrap();
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value(&out, "makespan"), "55");
    assert_eq!(value(&out, "status"), "optimal");
    assert!(value(&out, "schedule").ends_with("MakeSpan=55"));
}

#[test]
fn env_time_limit_is_honoured() {
    let o = djsp()
        .env("DJSP_TIME_LIMIT_SECS", "0")
        .arg("solve")
        .arg(ft06_path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "status"), "feasible");
}

#[test]
fn validate_good_and_bad() {
    let dir = tempfile::tempdir().unwrap();
    let solved = stdout(&djsp().arg("solve").arg(ft06_path()).output().unwrap());
    let good = value(&solved, "schedule").to_string();
    let good_path = dir.path().join("good.txt");
    fs::write(&good_path, &good).unwrap();
    let o = djsp()
        .arg("validate")
        .arg(ft06_path())
        .arg(&good_path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(value(&stdout(&o), "feasible"), "true");

    // An operation the instance does not have.
    let bad = good.replacen(
        "The schedules of machine M0 are: {",
        "The schedules of machine M0 are: {(J9, O1, 1, 0-1),",
        1,
    );
    let bad_path = dir.path().join("bad.txt");
    fs::write(&bad_path, bad).unwrap();
    let o = djsp().arg("validate").arg(ft06_path()).arg(&bad_path).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(value(&out, "feasible"), "false");
    assert!(out.contains("violation: extra_op: "));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(djsp().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(
        djsp().args(["solve", "--bogus", "x"]).output().unwrap().status.code(),
        Some(2)
    );
}

#[test]
fn domain_errors_exit_1_without_panicking() {
    let o = djsp().args(["solve", "/nonexistent/instance.txt"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error: "), "{err}");
    assert!(!err.contains("panicked"));
}

#[test]
fn inject_then_repair() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("sc.json");
    let o = djsp()
        .args(["inject", "--mode", "fast", "--seed", "5"])
        .arg(ft06_path())
        .arg("--out")
        .arg(&sc)
        .arg("--explain")
        .output()
        .unwrap();
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(value(&out, "mode"), "fast");
    assert_eq!(value(&out, "events"), "1");
    let o = djsp().arg("repair").arg(&sc).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    value(&out, "makespan").parse::<i64>().unwrap();
    value(&out, "affected").parse::<usize>().unwrap();
    assert!(value(&out, "schedule").contains("MakeSpan="));
}

#[test]
fn gen_dataset_then_eval_targets() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("fast.jsonl");
    let o = djsp()
        .args(["gen-dataset", "--mode", "fast", "--count", "12", "--seed", "3", "--out"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "written"), "12");

    // The dataset's own outputs as responses.
    let responses = dir.path().join("responses.jsonl");
    let lines: Vec<String> = fs::read_to_string(&data)
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            serde_json::json!({ "output": v["output"] }).to_string()
        })
        .collect();
    fs::write(&responses, lines.join("\n") + "\n").unwrap();
    let report = dir.path().join("report.json");
    let o = djsp()
        .arg("eval")
        .arg("--scenarios")
        .arg(&data)
        .arg("--responses")
        .arg(&responses)
        .arg("--report")
        .arg(&report)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(value(&out, "feasibility_rate"), "100.00%");
    assert_eq!(value(&out, "optimality_rate"), "100.00%");
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["optimal"], 12);
}

#[test]
fn bench_ft06_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let o = djsp()
            .args(["bench-ft06", "--per-setting", "4", "--seed", "7", "--out-dir"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success());
        out
    };
    let (a, b) = (run("a"), run("b"));
    for name in [
        "scenarios_fast",
        "scenarios_slow",
        "scenarios_auto_fast",
        "prompts_auto_slow",
    ] {
        let f = format!("{name}.jsonl");
        let x = fs::read(a.join(&f)).unwrap();
        assert_eq!(x, fs::read(b.join(&f)).unwrap(), "{f}");
        assert_eq!(x.iter().filter(|&&c| c == b'\n').count(), 4);
    }
    let auto = fs::read_to_string(a.join("prompts_auto_fast.jsonl")).unwrap();
    assert!(auto.lines().all(|l| l.contains("/auto_think")));
}
