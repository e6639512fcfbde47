//! Experiment configs: TOML files whose keys mirror the command-line flags.
//!
//! ```toml
//! seed = 7
//! out_dir = "results"
//!
//! [hitting]
//! slope = "golden"
//! radii = "auto"
//! out = "golden.csv"
//!
//! [verify.intersections]
//! K = "17"
//! trials = 10000
//! ```
//!
//! Top-level scalars are global flags; each table is one task, run in key order.
//! `[[name]]` arrays give several tasks of the same command.

use std::collections::BTreeMap;
use std::path::Path;

use toml::Value;

use crate::error::{CliError, CliResult};

const GLOBALS: [&str; 4] = ["seed", "jobs", "mem_budget", "out_dir"];

fn flag(key: &str) -> String {
    if key == "K" { "--K".into() } else { format!("--{}", key.replace('_', "-")) }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Integer(i) => Some(i.to_string()),
        Value::Float(f) => Some(f.to_string()),
        Value::Datetime(d) => Some(d.to_string()),
        _ => None,
    }
}

fn push_pair(argv: &mut Vec<String>, key: &str, v: &Value, path: &Path) -> CliResult<()> {
    let bad = |msg: String| CliError::Config { path: path.to_path_buf(), msg };
    match v {
        Value::Boolean(true) => argv.push(flag(key)),
        Value::Boolean(false) => {}
        Value::Array(items) if items.iter().all(|i| matches!(i, Value::String(_))) => {
            for i in items {
                argv.push(format!("{}={}", flag(key), scalar(i).expect("string")));
            }
        }
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            let parts = parts.ok_or_else(|| bad(format!("key {key:?}: arrays must hold scalars")))?;
            argv.push(format!("{}={}", flag(key), parts.join(",")));
        }
        Value::Table(_) => return Err(bad(format!("key {key:?}: unexpected table"))),
        other => argv.push(format!("{}={}", flag(key), scalar(other).expect("scalar"))),
    }
    Ok(())
}

fn task_argv(globals: &[String], words: &[&str], t: &toml::Table, path: &Path) -> CliResult<Vec<String>> {
    let mut argv = vec!["origami".to_string()];
    argv.extend(globals.iter().cloned());
    argv.extend(words.iter().map(|w| w.to_string()));
    for (k, v) in t {
        push_pair(&mut argv, k, v, path)?;
    }
    Ok(argv)
}

/// Argument vectors of the tasks in a config; `defaults` are global flags from the
/// command line, overridden by the config's own top-level keys.
pub fn task_argvs(path: &Path, defaults: &BTreeMap<String, String>) -> CliResult<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config { path: path.to_path_buf(), msg: format!("cannot read: {e}") })?;
    let table: toml::Table =
        text.parse().map_err(|e: toml::de::Error| CliError::Config { path: path.to_path_buf(), msg: e.to_string() })?;
    let bad = |msg: String| CliError::Config { path: path.to_path_buf(), msg };
    let mut global_vals = defaults.clone();
    for (k, v) in &table {
        if GLOBALS.contains(&k.as_str()) {
            let s = scalar(v).ok_or_else(|| bad(format!("global {k:?} must be a scalar")))?;
            global_vals.insert(k.clone(), s);
        } else if !matches!(v, Value::Table(_) | Value::Array(_)) {
            return Err(bad(format!("unknown global key {k:?}")));
        }
    }
    let mut globals = vec![];
    for (k, v) in &global_vals {
        globals.push(format!("{}={v}", flag(k)));
    }
    let mut out = vec![];
    for (name, v) in &table {
        if GLOBALS.contains(&name.as_str()) {
            continue;
        }
        if name == "run" {
            return Err(bad("a config cannot run another config".into()));
        }
        match v {
            Value::Table(t) if name == "verify" => {
                for (sub, inner) in t {
                    let inner = inner.as_table().ok_or_else(|| bad(format!("[verify.{sub}] must be a table")))?;
                    out.push(task_argv(&globals, &["verify", sub], inner, path)?);
                }
            }
            Value::Table(t) => out.push(task_argv(&globals, &[name], t, path)?),
            Value::Array(items) => {
                for item in items {
                    let t = item.as_table().ok_or_else(|| bad(format!("[[{name}]] entries must be tables")))?;
                    out.push(task_argv(&globals, &[name], t, path)?);
                }
            }
            _ => unreachable!("scalars handled above"),
        }
    }
    if out.is_empty() {
        return Err(bad("no tasks".into()));
    }
    Ok(out)
}
