//! Fast- and slow-mode dataset generation: sample a scenario per index, render
//! its prompt and expected response, and stream the records as JSON lines.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::events::{sample_scenario, EventSummary, SampleError, SamplingConfig, Scenario};
use crate::jsp::Time;
use crate::judge::{classify_mode, Mode};
use crate::solver::{solve_exact, SolveStatus};
use crate::textio::{build_prompt, build_target, parse_prompt_input, FastPolicy, FormatError, ParseError, TargetError};

/// Records generated in parallel per batch before being written in order.
const BATCH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub count: usize,
    pub base_seed: u64,
    pub fast_policy: FastPolicy,
    /// Mode and size ranges.
    pub sampling: SamplingConfig,
}

impl GenConfig {
    pub fn new(mode: Mode, count: usize, base_seed: u64) -> Self {
        Self {
            count,
            base_seed,
            fast_policy: FastPolicy::default(),
            sampling: SamplingConfig::new(mode),
        }
    }

    pub fn mode(&self) -> Mode {
        self.sampling.mode
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub seed: u64,
    pub mode: Mode,
    pub n: usize,
    pub m: usize,
    pub event_summary: EventSummary,
    pub baseline_makespan: Time,
    pub final_optimal_makespan: Time,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub instruction: String,
    pub input: String,
    pub output: String,
    pub meta: RecordMeta,
}

impl DatasetRecord {
    /// Rebuild the scenario from the input text and the recorded seed.
    pub fn scenario(&self) -> Result<Scenario, ParseError> {
        let p = parse_prompt_input(&self.input)?;
        Ok(Scenario {
            baseline: p.baseline,
            baseline_schedule: p.schedule,
            events: p.events,
            mode: p.mode,
            seed: self.meta.seed,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSummary {
    pub written: usize,
    pub skipped: usize,
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid generation config: {0}")]
    Config(String),
    #[error("record {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: SampleError,
    },
    #[error("record {index}: {source}")]
    Target {
        index: usize,
        #[source]
        source: TargetError,
    },
    #[error("record {index}: {source}")]
    Format {
        index: usize,
        #[source]
        source: FormatError,
    },
    #[error("record {index}: post-event instance not solved to optimality ({status:?})")]
    FinalNotOptimal { index: usize, status: SolveStatus },
    #[error("record {index}: sampled {found} mode for a {expected} config")]
    ModeMismatch { index: usize, expected: Mode, found: Mode },
    #[error("I/O error after {written} records: {source}")]
    Io {
        written: usize,
        #[source]
        source: io::Error,
    },
}

/// Stable per-record seed: splitmix64 over the base seed and index.
pub fn record_seed(base_seed: u64, index: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(index as u64))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn make_record(config: &GenConfig, index: usize) -> Result<DatasetRecord, GenError> {
    if config.count == 0 {
        return Err(GenError::Config("count must be at least 1".into()));
    }
    if index >= config.count {
        return Err(GenError::Config(format!(
            "index {index} is past count {}",
            config.count
        )));
    }
    let seed = record_seed(config.base_seed, index);
    let scenario = sample_scenario(&config.sampling, seed).map_err(|source| GenError::Sample { index, source })?;
    let mode = config.mode();
    let found = classify_mode(&scenario.events).unwrap_or(Mode::Fast);
    if found != mode {
        return Err(GenError::ModeMismatch {
            index,
            expected: mode,
            found,
        });
    }
    let prompt = build_prompt(&scenario).map_err(|source| GenError::Format { index, source })?;
    let target = build_target(&scenario, config.fast_policy, config.sampling.time_limit)
        .map_err(|source| GenError::Target { index, source })?;

    let final_optimal_makespan = match (&target.revised, config.fast_policy) {
        (Some((_, c)), FastPolicy::ExactResolve) => *c,
        _ => {
            let r = solve_exact(&target.final_state, config.sampling.time_limit);
            if r.status != SolveStatus::Optimal {
                return Err(GenError::FinalNotOptimal {
                    index,
                    status: r.status,
                });
            }
            r.makespan
        }
    };
    let baseline_makespan = crate::jsp::makespan(&scenario.baseline, &scenario.baseline_schedule)
        .expect("sampled baseline schedule covers the baseline");

    Ok(DatasetRecord {
        instruction: prompt.instruction,
        input: prompt.input,
        output: target.text,
        meta: RecordMeta {
            seed,
            mode,
            n: scenario.baseline.job_count(),
            m: scenario.baseline.machine_count(),
            event_summary: EventSummary::of(&scenario.events),
            baseline_makespan,
            final_optimal_makespan,
        },
    })
}

/// Write `config.count` records as JSON lines to `out_path`.
pub fn generate_dataset(config: &GenConfig, out_path: &Path) -> Result<GenSummary, GenError> {
    let file = File::create(out_path).map_err(|source| GenError::Io { written: 0, source })?;
    let mut w = BufWriter::new(file);
    let summary = generate_to_writer(config, &mut w)?;
    w.flush().map_err(|source| GenError::Io {
        written: summary.written,
        source,
    })?;
    Ok(summary)
}

/// Records that cannot be produced (solver limit, unsupported baseline) are
/// skipped and logged; I/O failures abort.
pub fn generate_to_writer<W: Write>(config: &GenConfig, w: &mut W) -> Result<GenSummary, GenError> {
    if config.count == 0 {
        return Err(GenError::Config("count must be at least 1".into()));
    }
    let mut summary = GenSummary::default();
    for batch_start in (0..config.count).step_by(BATCH) {
        let batch_end = (batch_start + BATCH).min(config.count);
        let records: Vec<_> = (batch_start..batch_end)
            .into_par_iter()
            .map(|i| make_record(config, i))
            .collect();
        for result in records {
            match result {
                Ok(record) => {
                    let line = serde_json::to_string(&record).expect("records serialize");
                    writeln!(w, "{line}").map_err(|source| {
                        log::warn!("dataset file is partial: {} records written", summary.written);
                        GenError::Io {
                            written: summary.written,
                            source,
                        }
                    })?;
                    summary.written += 1;
                }
                Err(e @ GenError::Config(_)) => return Err(e),
                Err(e) => {
                    log::warn!("skipping {e}");
                    summary.skipped += 1;
                }
            }
        }
        log::info!("{batch_end}/{} records", config.count);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let c = GenConfig::new(Mode::Fast, 4, 11);
        assert_eq!(make_record(&c, 0).unwrap(), make_record(&c, 0).unwrap());
    }

    #[test]
    fn seeds_differ_by_index() {
        assert_ne!(record_seed(1, 0), record_seed(1, 1));
        assert_ne!(record_seed(1, 0), record_seed(2, 0));
    }

    #[test]
    fn zero_count_rejected() {
        let c = GenConfig::new(Mode::Slow, 0, 1);
        assert!(matches!(
            generate_to_writer(&c, &mut Vec::new()),
            Err(GenError::Config(_))
        ));
    }

    #[test]
    fn slow_record_has_markers() {
        let c = GenConfig::new(Mode::Slow, 2, 5);
        let r = make_record(&c, 1).unwrap();
        assert!(r.output.contains("[unused16]") && r.output.contains("[unused17]"));
        assert!(r.meta.event_summary.total() >= 2);
        assert_eq!(r.scenario().unwrap().events.len(), r.meta.event_summary.total());
    }
}
