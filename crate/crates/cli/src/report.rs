use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Top-level report. `wall_clock_seconds` is the only field that varies
/// between identical runs.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a C,
    pub seed: u64,
    pub result: R,
    pub wall_clock_seconds: f64,
}

pub fn emit<C: Serialize, R: Serialize>(
    config: &C,
    seed: u64,
    result: R,
    started: Instant,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let envelope = Envelope {
        schema: SCHEMA,
        tool: "addiviol",
        version: env!("CARGO_PKG_VERSION"),
        config,
        seed,
        result,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let mut text = serde_json::to_string_pretty(&envelope)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
