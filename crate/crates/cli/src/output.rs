use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::args::{Cli, Command};
use crate::error::{CliError, CliResult};

/// Provenance shared by every artifact of one command.
pub struct Sink {
    pub out_dir: PathBuf,
    pub seed: u64,
    pub config_hash: String,
    pub command: String,
    /// Human-readable summary lines, printed after the artifacts are written.
    pub summary: Vec<String>,
    /// Whether an artifact went to stdout, which moves the summary to stderr.
    stdout_used: bool,
}

/// SHA-256 over the command, its parameters, the seed and the memory budget.
/// Output paths, the output directory and the thread count do not enter.
pub fn config_hash(command: &Command, seed: u64, mem_budget: u64) -> String {
    let canon = json!({ "command": command, "seed": seed, "mem_budget": mem_budget });
    format!("{:x}", Sha256::digest(canon.to_string().as_bytes()))
}

fn command_name(c: &Command) -> String {
    match serde_json::to_value(c) {
        Ok(Value::Object(m)) => {
            let (k, v) = m.into_iter().next().expect("one variant");
            match v {
                Value::Object(inner) if k == "verify" => {
                    format!("verify {}", inner.keys().next().cloned().unwrap_or_default())
                }
                _ => k,
            }
        }
        _ => "unknown".into(),
    }
}

impl Sink {
    pub fn new(cli: &Cli) -> Self {
        Sink {
            out_dir: cli.out_dir.clone(),
            seed: cli.seed,
            config_hash: config_hash(&cli.command, cli.seed, cli.mem_budget),
            command: command_name(&cli.command),
            summary: vec![],
            stdout_used: false,
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() { p.to_path_buf() } else { self.out_dir.join(p) }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    fn provenance(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("config_hash".into(), Value::String(self.config_hash.clone()));
        m.insert("seed".into(), json!(self.seed));
        m
    }

    fn write_bytes(&mut self, path: Option<&Path>, bytes: &[u8]) -> CliResult<Option<PathBuf>> {
        match path {
            Some(p) => {
                let full = self.resolve(p);
                if let Some(dir) = full.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                }
                fs::write(&full, bytes).map_err(|e| CliError::io(&full, e))?;
                Ok(Some(full))
            }
            None => {
                self.stdout_used = true;
                std::io::stdout().write_all(bytes).map_err(|e| CliError::io("<stdout>", e))?;
                Ok(None)
            }
        }
    }

    /// Writes a JSON report with `command`, `config_hash` and `seed` prepended.
    pub fn json<T: Serialize>(&mut self, path: Option<&Path>, report: &T) -> CliResult<()> {
        let mut m = self.provenance();
        match serde_json::to_value(report).expect("reports serialize") {
            Value::Object(body) => m.extend(body),
            other => {
                m.insert("report".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(m)).expect("json");
        text.push('\n');
        self.write_bytes(path, text.as_bytes())?;
        Ok(())
    }

    /// Writes CSV rows; a file also gets a `<file>.meta.json` sidecar with the provenance.
    pub fn csv<T: Serialize>(&mut self, path: Option<&Path>, rows: &[T]) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(vec![]);
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io("<csv>", e.into_error()))?;
        if let Some(full) = self.write_bytes(path, &bytes)? {
            self.sidecar(&full, rows.len())?;
        }
        Ok(())
    }

    /// Writes plain text; a file also gets a sidecar.
    pub fn text(&mut self, path: Option<&Path>, body: &str) -> CliResult<()> {
        if let Some(full) = self.write_bytes(path, body.as_bytes())? {
            self.sidecar(&full, body.lines().count())?;
        }
        Ok(())
    }

    fn sidecar(&mut self, full: &Path, rows: usize) -> CliResult<()> {
        let mut m = self.provenance();
        m.insert("rows".into(), json!(rows));
        let mut name = full.as_os_str().to_owned();
        name.push(".meta.json");
        let mut text = serde_json::to_string_pretty(&Value::Object(m)).expect("json");
        text.push('\n');
        fs::write(&name, text).map_err(|e| CliError::io(PathBuf::from(&name), e))
    }

    pub fn finish(&self) {
        for line in &self.summary {
            if self.stdout_used {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
        }
    }
}
