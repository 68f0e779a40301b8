//! Run manifests: every command leaves a `manifest.json` behind that echoes
//! the effective configuration, names each output file, and records enough
//! metadata (tool version, wall time, status) to rerun the job and compare.

use habwave_core::Result;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// How a run ended, ordered from best to worst; doubles as the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// Everything requested ran and passed.
    Pass = 0,
    /// A requested diagnostic ran to completion and failed its tolerance.
    DiagnosticFailure = 1,
    /// A diagnostic could not be evaluated (empty or clipped windows).
    Inconclusive = 2,
    /// The run could not be completed at all (bad configuration, violated
    /// hypotheses, numerical breakdown).
    Error = 3,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        self as i32
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::DiagnosticFailure => "diagnostic_failure",
            Status::Inconclusive => "inconclusive",
            Status::Error => "error",
        }
    }

    /// Combines per-diagnostic statuses: any failure dominates, then
    /// inconclusiveness, then pass.
    pub fn worst(iter: impl IntoIterator<Item = Status>) -> Status {
        iter.into_iter().fold(Status::Pass, |a, b| a.max(b))
    }
}

/// Accumulates outputs and timing for one run directory.
pub struct Manifest {
    command: &'static str,
    dir: PathBuf,
    started: Instant,
    started_unix: u64,
    outputs: Vec<Value>,
}

impl Manifest {
    /// Starts timing and ensures the output directory exists.
    pub fn begin(command: &'static str, dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Manifest {
            command,
            dir: dir.to_path_buf(),
            started: Instant::now(),
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: Vec::new(),
        })
    }

    /// Writes `content` under the run directory and records it.
    pub fn write_text(&mut self, name: &str, role: &str, content: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, content)?;
        self.outputs.push(json!({ "role": role, "path": name }));
        Ok(path)
    }

    /// Writes `manifest.json` and returns the status unchanged, so callers
    /// can end with `manifest.finish(...)`.
    pub fn finish(self, config_echo: Value, status: Status, summary: Value) -> Result<Status> {
        let manifest = json!({
            "command": self.command,
            "tool": { "name": "habwave", "version": env!("CARGO_PKG_VERSION") },
            "status": status.label(),
            "started_unix": self.started_unix,
            "wall_ms": self.started.elapsed().as_millis() as u64,
            "config": config_echo,
            "outputs": self.outputs,
            "summary": summary,
        });
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest)
            .expect("serializing an already-built json value cannot fail");
        fs::write(&path, text + "\n")?;
        Ok(status)
    }
}
