//! Artifact files of a run.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rhsolve::annulus::AnnulusSolution;
use rhsolve::boundary::BoundaryTrace;
use serde::Serialize;
use serde_json::json;

use crate::config::{Format, Problem};
use crate::Failure;

pub struct Artifacts {
    dir: PathBuf,
    json: bool,
    csv: bool,
    seed: u64,
}

fn io(path: &Path, e: std::io::Error) -> Failure {
    Failure::Config(format!("cannot write {}: {e}", path.display()))
}

impl Artifacts {
    pub fn new(p: &Problem) -> Result<Self, Failure> {
        let dir = p.config.outputs.directory.clone();
        std::fs::create_dir_all(&dir).map_err(|e| io(&dir, e))?;
        let formats = &p.config.outputs.formats;
        Ok(Self { dir, json: formats.contains(&Format::Json), csv: formats.contains(&Format::Csv), seed: p.config.seed })
    }

    fn write(&self, name: &str, text: &str) -> Result<(), Failure> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).map_err(|e| io(&path, e))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        if !self.json {
            return Ok(());
        }
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Config(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn result<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        self.json("result.json", value)
    }

    pub fn csv(&self, name: &str, text: &str) -> Result<(), Failure> {
        if self.csv {
            self.write(name, text)
        } else {
            Ok(())
        }
    }

    pub fn trace(&self, j: usize, trace: &BoundaryTrace) -> Result<(), Failure> {
        self.csv(&format!("trace_{j}.csv"), &trace.to_csv())
    }

    pub fn annulus_traces(&self, sol: &AnnulusSolution) -> Result<(), Failure> {
        for (j, t) in sol.traces.iter().enumerate() {
            self.trace(j, t)?;
        }
        Ok(())
    }

    pub fn history(&self, history: &[f64]) -> Result<(), Failure> {
        let mut text = String::from("iteration,residual\n");
        for (k, r) in history.iter().enumerate() {
            text.push_str(&format!("{k},{r:e}\n"));
        }
        self.csv("history.csv", &text)
    }

    /// Residual history of a run that stopped without converging.
    pub fn failure_history(&self, e: &rhsolve::Error) {
        if let rhsolve::Error::NoConvergence { history, .. } = e {
            let _ = self.history(history);
        }
    }

    pub fn metadata(&self, command: &str, config: &Path, start: Instant) -> Result<(), Failure> {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        self.json(
            "metadata.json",
            &json!({
                "command": command,
                "version": env!("CARGO_PKG_VERSION"),
                "config": config.display().to_string(),
                "seed": self.seed,
                "finished_unix": now,
                "elapsed_seconds": start.elapsed().as_secs_f64(),
            }),
        )
    }
}
