use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use djsp_core::datasetgen::{generate_dataset, record_seed, GenConfig};
use djsp_core::eval::{evaluate_responses_with, mode_selection_matrix, EvalOptions};
use djsp_core::events::{sample_scenario, SamplingConfig};
use djsp_core::judge::{classify_mode, disruption_score, Mode};
use djsp_core::solver::{default_time_limit, solve_exact};
use djsp_core::textio::{
    build_prompt, build_target, format_event_text, format_schedule_text, parse_model_output, parse_orlib,
    parse_schedule_text, parse_tasks_text, FastPolicy,
};
use djsp_core::{ft06, jsp, local_repair, Instance, Scenario};

mod files;

use files::{read_responses, read_scenarios, write_jsonl};

#[derive(Parser)]
#[command(name = "djsp", version, about = "Dynamic job-shop scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceFormat {
    Orlib,
    Tasks,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fast,
    Slow,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fast => Mode::Fast,
            ModeArg::Slow => Mode::Slow,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Exact,
    Repair,
}

impl From<PolicyArg> for FastPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Exact => FastPolicy::ExactResolve,
            PolicyArg::Repair => FastPolicy::LocalRepair,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance to optimality.
    Solve {
        file: PathBuf,
        /// Input layout; detected from the content when omitted.
        #[arg(long, value_enum)]
        format: Option<InstanceFormat>,
        /// Seconds; overrides DJSP_TIME_LIMIT_SECS.
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Check a schedule listing against an instance. Exits 1 if infeasible.
    Validate {
        instance: PathBuf,
        schedule: PathBuf,
        #[arg(long, value_enum)]
        format: Option<InstanceFormat>,
    },
    /// Sample a disturbance scenario on an instance.
    Inject {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        seed: u64,
        instance: PathBuf,
        /// Print the event sentences and disruption score instead of the
        /// scenario JSON (which then goes only to --out).
        #[arg(long)]
        explain: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<InstanceFormat>,
    },
    /// Generate a fine-tuning dataset as JSON lines.
    GenDataset {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        fast_policy: PolicyArg,
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Locally repair a scenario's baseline schedule.
    Repair { scenario: PathBuf },
    /// Score responses against scenarios.
    Eval {
        /// JSON lines of scenarios or dataset records.
        #[arg(long)]
        scenarios: PathBuf,
        /// JSON lines, each a response string or an object with an "output" field.
        #[arg(long)]
        responses: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Check fast schedules without requiring the task block to match.
        #[arg(long)]
        schedule_only: bool,
        #[arg(long)]
        time_limit: Option<f64>,
    },
    /// Write FT06 evaluation scenarios and prompts (fast, slow and auto variants).
    BenchFt06 {
        #[arg(long, default_value_t = 30)]
        per_setting: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "ft06_bench")]
        out_dir: PathBuf,
    },
}

/// `println!` that ignores a closed stdout instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn time_limit(secs: Option<f64>) -> Result<Duration> {
    match secs {
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Duration::from_secs_f64(s)),
        Some(s) => bail!("invalid time limit {s}"),
        None => Ok(default_time_limit()),
    }
}

fn load_instance(path: &Path, format: Option<InstanceFormat>) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let format = format.unwrap_or_else(|| {
        if text.trim_start().starts_with("The ") {
            InstanceFormat::Tasks
        } else {
            InstanceFormat::Orlib
        }
    });
    let parsed = match format {
        InstanceFormat::Orlib => parse_orlib(&text),
        InstanceFormat::Tasks => parse_tasks_text(&text),
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Solve {
            file,
            format,
            time_limit: secs,
        } => {
            let instance = load_instance(&file, format)?;
            let r = solve_exact(&instance, time_limit(secs)?);
            out!("status: {}", r.status);
            out!("makespan: {}", r.makespan);
            out!("nodes: {}", r.nodes_explored);
            out!("schedule: {}", format_schedule_text(&instance, &r.schedule)?);
            Ok(0)
        }
        Command::Validate {
            instance,
            schedule,
            format,
        } => {
            let instance = load_instance(&instance, format)?;
            let text = fs::read_to_string(&schedule).with_context(|| format!("reading {}", schedule.display()))?;
            let listing = parse_schedule_text(&text).with_context(|| format!("parsing {}", schedule.display()))?;
            let report = jsp::validate_listing(&instance, &listing.instance, &listing.schedule);
            out!("feasible: {}", report.feasible());
            if report.feasible() {
                out!("makespan: {}", jsp::makespan(&instance, &listing.schedule)?);
            }
            for v in &report.violations {
                out!("violation: {}: {}", v.kind, v.detail);
            }
            Ok(if report.feasible() { 0 } else { 1 })
        }
        Command::Inject {
            mode,
            seed,
            instance,
            explain,
            out,
            format,
        } => {
            let baseline = load_instance(&instance, format)?;
            let config = SamplingConfig::new(mode.into()).with_baseline(baseline);
            let scenario = sample_scenario(&config, seed)?;
            let json = serde_json::to_string(&scenario)?;
            if let Some(path) = &out {
                fs::write(path, format!("{json}\n")).with_context(|| format!("writing {}", path.display()))?;
            }
            if explain {
                let score = disruption_score(&scenario);
                out!("mode: {}", classify_mode(&scenario.events)?);
                out!("events: {}", scenario.events.len());
                for e in &scenario.events {
                    out!("event: {}", format_event_text(e));
                }
                out!("affected_ops: {}", score.affected_ops);
                out!("maintenance_conflicts: {}", score.maintenance_conflicts);
                out!("structural_changes: {}", score.structural_changes);
                out!("disruption: {}", score.total);
            } else if out.is_none() {
                out!("{json}");
            }
            Ok(0)
        }
        Command::GenDataset {
            mode,
            count,
            seed,
            out,
            fast_policy,
            time_limit: secs,
        } => {
            let mut config = GenConfig::new(mode.into(), count, seed);
            config.fast_policy = fast_policy.into();
            config.sampling.time_limit = time_limit(secs)?;
            let summary = generate_dataset(&config, &out)?;
            out!("written: {}", summary.written);
            out!("skipped: {}", summary.skipped);
            out!("out: {}", out.display());
            Ok(0)
        }
        Command::Repair { scenario } => {
            let text = fs::read_to_string(&scenario).with_context(|| format!("reading {}", scenario.display()))?;
            let sc: Scenario = serde_json::from_str(text.trim()).context("parsing scenario JSON")?;
            let r = local_repair(&sc)?;
            let baseline = jsp::makespan(&sc.baseline, &sc.baseline_schedule)?;
            out!("baseline_makespan: {baseline}");
            out!("makespan: {}", r.makespan);
            let ids: Vec<String> = r.affected.iter().map(|id| id.to_string()).collect();
            out!("affected: {}", r.affected.len());
            out!("affected_ops: {}", ids.join(" "));
            out!("schedule: {}", format_schedule_text(&r.instance, &r.schedule)?);
            Ok(0)
        }
        Command::Eval {
            scenarios,
            responses,
            report,
            schedule_only,
            time_limit: secs,
        } => {
            let scenarios = read_scenarios(&scenarios)?;
            let texts = read_responses(&responses)?;
            if scenarios.len() != texts.len() {
                bail!("{} scenarios but {} responses", scenarios.len(), texts.len());
            }
            let parsed: Vec<_> = scenarios
                .iter()
                .zip(&texts)
                .map(|(sc, t)| parse_model_output(t, classify_mode(&sc.events).unwrap_or(Mode::Fast)))
                .collect();
            let options = EvalOptions {
                require_task_match: !schedule_only,
                time_limit: time_limit(secs)?,
            };
            let result = evaluate_responses_with(&scenarios, &parsed, &options)?;
            print!("{}", result.render());
            let pairs: Vec<(Mode, Mode)> = result
                .per_scenario
                .iter()
                .filter_map(|r| Some((r.true_mode?, r.chosen_mode?)))
                .collect();
            if let Ok(matrix) = mode_selection_matrix(&pairs) {
                for line in matrix.render().lines() {
                    out!("mode_{line}");
                }
            }
            if let Some(path) = report {
                let json = serde_json::to_string_pretty(&result)?;
                fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            Ok(0)
        }
        Command::BenchFt06 {
            per_setting,
            seed,
            out_dir,
        } => {
            if per_setting == 0 {
                bail!("--per-setting must be at least 1");
            }
            bench_ft06(per_setting, seed, &out_dir)?;
            Ok(0)
        }
    }
}

#[derive(serde::Serialize)]
struct PromptLine {
    index: usize,
    instruction: String,
    input: String,
    /// Ground-truth response for the scenario's true mode.
    target: String,
}

fn bench_ft06(per_setting: usize, seed: u64, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for mode in [Mode::Fast, Mode::Slow] {
        let config = SamplingConfig::new(mode).with_baseline(ft06::ft06());
        let scenarios: Vec<Scenario> = (0..per_setting)
            .map(|i| sample_scenario(&config, record_seed(seed, i)))
            .collect::<Result<_, _>>()?;
        let auto: Vec<Scenario> = scenarios.iter().map(Scenario::as_auto).collect();
        for (variant, list) in [(mode.to_string(), &scenarios), (format!("auto_{mode}"), &auto)] {
            let prompts = list
                .iter()
                .enumerate()
                .map(|(index, sc)| -> Result<PromptLine> {
                    let p = build_prompt(sc)?;
                    let t = build_target(sc, FastPolicy::ExactResolve, config.time_limit)?;
                    Ok(PromptLine {
                        index,
                        instruction: p.instruction,
                        input: p.input,
                        target: t.text,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let sc_path = out_dir.join(format!("scenarios_{variant}.jsonl"));
            let pr_path = out_dir.join(format!("prompts_{variant}.jsonl"));
            write_jsonl(&sc_path, list)?;
            write_jsonl(&pr_path, &prompts)?;
            out!("scenarios_{variant}: {}", sc_path.display());
            out!("prompts_{variant}: {}", pr_path.display());
        }
    }
    Ok(())
}
