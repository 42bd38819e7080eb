//! Artifact directory: atomic writes, hash-stamped JSON and CSV, and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const CORE_VERSION: &str = adlab::VERSION;
pub const CLI_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub adlab: String,
    pub adlab_cli: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions { adlab: CORE_VERSION.into(), adlab_cli: CLI_VERSION.into() }
    }
}

/// JSON wrapper carried by every artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<D> {
    pub kind: String,
    pub config_hash: String,
    pub versions: Versions,
    pub data: D,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub command: String,
    pub status: String,
    pub exit_code: i32,
    pub artifacts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub versions: Versions,
    /// Seconds since the Unix epoch of the last update.
    pub timestamp: u64,
    pub stages: Vec<StageRecord>,
}

pub struct ArtifactDir {
    root: PathBuf,
    hash: String,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("artifact");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

impl ArtifactDir {
    pub fn new(root: impl Into<PathBuf>, hash: impl Into<String>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| io_err(&root, e))?;
        Ok(ArtifactDir { root, hash: hash.into() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write_json<D: Serialize>(&self, rel: &str, kind: &str, data: &D) -> Result<String, CliError> {
        let env = Envelope { kind: kind.into(), config_hash: self.hash.clone(), versions: Versions::current(), data };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        write_atomic(&self.path(rel), text.as_bytes())?;
        Ok(rel.to_string())
    }

    /// CSV with a leading `# config_hash=...` comment line.
    pub fn write_csv(&self, rel: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>) -> Result<String, CliError> {
        let mut buf = format!("# config_hash={} adlab={} adlab_cli={}\n", self.hash, CORE_VERSION, CLI_VERSION).into_bytes();
        body(&mut buf)?;
        write_atomic(&self.path(rel), &buf)?;
        Ok(rel.to_string())
    }

    pub fn write_text(&self, rel: &str, text: &str) -> Result<String, CliError> {
        write_atomic(&self.path(rel), text.as_bytes())?;
        Ok(rel.to_string())
    }

    pub fn read_json(&self, rel: &str) -> Result<Option<Envelope<Value>>, CliError> {
        let p = self.path(rel);
        if !p.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&p).map_err(|e| io_err(&p, e))?;
        serde_json::from_str(&text).map(Some).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
    }

    /// Appends a stage to `manifest.json`, keeping earlier entries from the same config.
    pub fn record_stage(&self, stage: StageRecord) -> Result<(), CliError> {
        let p = self.path("manifest.json");
        let mut manifest = fs::read_to_string(&p)
            .ok()
            .and_then(|t| serde_json::from_str::<Manifest>(&t).ok())
            .filter(|m| m.config_hash == self.hash)
            .unwrap_or(Manifest { config_hash: self.hash.clone(), versions: Versions::current(), timestamp: 0, stages: Vec::new() });
        manifest.stages.retain(|s| s.command != stage.command);
        manifest.stages.push(stage);
        manifest.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))? + "\n";
        write_atomic(&p, text.as_bytes())
    }
}

/// Writes `(header, rows)` as CSV into `buf`, numbers in shortest round-trip form.
pub fn csv_rows(buf: &mut Vec<u8>, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(buf);
    let err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
