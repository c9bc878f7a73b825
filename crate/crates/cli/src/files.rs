use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use djsp_core::{DatasetRecord, Scenario};

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Lines holding either a scenario or a dataset record.
pub fn read_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let values: Vec<Value> = read_jsonl(path)?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let at = || format!("{}:{}", path.display(), i + 1);
            if v.get("input").is_some() {
                let record: DatasetRecord = serde_json::from_value(v).with_context(at)?;
                record.scenario().with_context(at)
            } else {
                serde_json::from_value(v).with_context(at)
            }
        })
        .collect()
}

/// Lines holding a JSON string or an object with an `output` field.
pub fn read_responses(path: &Path) -> Result<Vec<String>> {
    let values: Vec<Value> = read_jsonl(path)?;
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::String(s) => Ok(s),
            Value::Object(mut o) => match o.remove("output") {
                Some(Value::String(s)) => Ok(s),
                _ => bail!("{}:{}: object has no string 'output'", path.display(), i + 1),
            },
            _ => bail!("{}:{}: expected a string or an object", path.display(), i + 1),
        })
        .collect()
}
