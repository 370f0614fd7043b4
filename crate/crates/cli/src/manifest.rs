use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cmshift::Error;

use crate::commands::{error_code, error_document, execute_into, Outcome};
use crate::output::write_atomic;
use crate::{Cli, Command};

/// A batch of commands.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Passed to every entry that takes `--seed` and does not set it.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    /// Output subdirectory; must be unique.
    pub name: String,
    pub command: String,
    /// Flag name (without dashes) to value; lists become comma-separated, `true` a bare flag.
    #[serde(default)]
    pub args: BTreeMap<String, Value>,
}

#[derive(Serialize)]
struct EntryResult {
    name: String,
    exit: u8,
}

fn argv(entry: &Entry, seed: Option<u64>, base: &Path) -> Vec<String> {
    let mut v = vec!["cmshift".to_string(), entry.command.clone()];
    for (k, val) in &entry.args {
        let flag = format!("--{k}");
        match val {
            Value::Bool(true) => v.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(xs) => {
                v.push(flag);
                v.push(xs.iter().map(scalar).collect::<Vec<_>>().join(","));
            }
            other => {
                v.push(flag);
                let s = scalar(other);
                // relative paths are read from the manifest's directory
                if matches!(k.as_str(), "graph" | "measure") && Path::new(&s).is_relative() {
                    v.push(base.join(&s).to_string_lossy().into_owned());
                } else {
                    v.push(s);
                }
            }
        }
    }
    if entry.command == "density-demo" && !entry.args.contains_key("seed") {
        if let Some(s) = seed {
            v.push("--seed".into());
            v.push(s.to_string());
        }
    }
    v
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn failure(e: &Error) -> Outcome {
    Outcome::Failed { json: serde_json::to_string_pretty(&error_document(e)).expect("json"), code: error_code(e) }
}

pub fn load(path: &Path) -> Result<Manifest, Error> {
    let text = std::fs::read_to_string(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

/// Run a manifest with at most `jobs` entries in flight. Each entry writes into its own
/// subdirectory; a summary goes to `manifest_results.json`.
pub fn run(path: &Path, jobs: usize, out: Option<&Path>) -> Outcome {
    let manifest = match load(path) {
        Ok(m) => m,
        Err(e) => return failure(&e),
    };
    let Some(out) = out.map(Path::to_path_buf).or(manifest.out.clone()) else {
        return failure(&Error::validation("out", "a manifest run needs an output directory"));
    };
    let mut names: Vec<&str> = manifest.entries.iter().map(|e| e.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) || names.iter().any(|n| n.is_empty() || n.contains(['/', '\\'])) {
        return failure(&Error::validation("entries.name", "entry names must be unique plain names"));
    }
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => return failure(&Error::validation("jobs", e.to_string())),
    };
    let results: Vec<EntryResult> = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|entry| {
                let dir = out.join(&entry.name);
                let exit = match Cli::try_parse_from(argv(entry, manifest.seed, &base)) {
                    Ok(Cli { command: Command::Run { .. } }) => {
                        let o = failure(&Error::validation("command", "manifests cannot nest"));
                        let _ = write_atomic(&dir.join("error.json"), error_json(&o).as_bytes());
                        o.code()
                    }
                    Ok(cli) => {
                        let o = execute_into(&cli.command, Some(&dir));
                        if let Outcome::Failed { .. } = o {
                            let _ = write_atomic(&dir.join("error.json"), error_json(&o).as_bytes());
                        }
                        o.code()
                    }
                    Err(e) => {
                        let o = failure(&Error::validation(format!("entries.{}", entry.name), e.to_string()));
                        let _ = write_atomic(&dir.join("error.json"), error_json(&o).as_bytes());
                        2
                    }
                };
                EntryResult { name: entry.name.clone(), exit }
            })
            .collect()
    });
    let worst = results.iter().map(|r| r.exit).max().unwrap_or(0);
    let summary = json!({ "schema_version": crate::commands::SCHEMA_VERSION, "entries": results });
    let text = serde_json::to_string_pretty(&summary).expect("json");
    if let Err(e) = write_atomic(&out.join("manifest_results.json"), format!("{text}\n").as_bytes()) {
        return failure(&e);
    }
    Outcome::Done { json: text, code: worst }
}

fn error_json(o: &Outcome) -> String {
    match o {
        Outcome::Done { json, .. } | Outcome::Failed { json, .. } => format!("{json}\n"),
    }
}
