//! Per-scenario JSON documents and the summary CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use qhlab::scenarios::Scenario;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    /// Seconds since the Unix epoch; the only field that varies between identical runs.
    generated_at: u64,
    scenario: &'a Scenario,
}

/// Writes `<name>.json` per scenario (repeated names get `_2`, `_3`, ...) and
/// `summary.csv`; returns the written paths.
pub fn write_reports(out: &Path, scenarios: &[Scenario]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut paths = Vec::new();
    let mut csv = String::from("scenario,check,computed,bound,pass\n");
    for s in scenarios {
        let k = seen.entry(&s.name).or_insert(0);
        *k += 1;
        let stem = if *k == 1 { s.name.clone() } else { format!("{}_{k}", s.name) };
        let path = out.join(format!("{stem}.json"));
        let doc = Document { schema_version: SCHEMA_VERSION, generated_at: now, scenario: s };
        let text = serde_json::to_string_pretty(&doc)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
        paths.push(path);
        for c in &s.checks {
            let _ = writeln!(csv, "{stem},{},{},{},{}", c.id, c.computed, c.bound, c.pass);
        }
    }
    let path = out.join("summary.csv");
    std::fs::write(&path, csv).with_context(|| format!("cannot write {}", path.display()))?;
    paths.push(path);
    Ok(paths)
}
