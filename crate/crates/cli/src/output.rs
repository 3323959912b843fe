use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::sha256_hex;

/// One CSV record; `HEADER` names its fields in order.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize, S: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    seed: u64,
    config_sha256: String,
    config: &'a C,
    csv_sha256: String,
    summary: S,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes `rows` to `out` and the resolved config with its hash next to
/// it. Both files depend only on their inputs.
pub fn write_results<R: Row, C: Serialize, S: Serialize>(
    out: &Path,
    rows: &[R],
    subcommand: &str,
    seed: u64,
    config: &C,
    summary: S,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(R::HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    let csv_bytes = w.into_inner().context("flushing CSV")?;
    fs::write(out, &csv_bytes).with_context(|| format!("writing {}", out.display()))?;

    let config_json = serde_json::to_vec(config)?;
    let sidecar = Sidecar {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        seed,
        config_sha256: sha256_hex(&config_json),
        config,
        csv_sha256: sha256_hex(&csv_bytes),
        summary,
    };
    let path = sidecar_path(out);
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
