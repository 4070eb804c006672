//! Parallel execution of many scenarios. Each scenario writes only into
//! its own `<out>/<stem>/` directory.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::pipeline::{run_scenario, CliError, Options};
use crate::scenario;

/// Expands directories to their `*.toml` files (sorted); files are kept.
pub fn collect(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "toml"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Outcome of one scenario in a batch.
#[derive(Debug)]
pub struct Outcome {
    pub path: PathBuf,
    pub dir: PathBuf,
    pub result: Result<(), CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        self.result.as_ref().err().map_or(0, CliError::exit_code)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scenario": self.path.display().to_string(),
            "out": self.dir.display().to_string(),
            "exit_code": self.exit_code(),
        })
    }
}

fn one(path: &Path, out: &Path, opts: &Options) -> Outcome {
    let stem = path
        .file_stem()
        .map_or_else(|| "scenario".into(), |s| s.to_string_lossy().into_owned());
    let dir = out.join(stem);
    let result = scenario::load(path)
        .map_err(CliError::from)
        .and_then(|l| run_scenario(&l, opts))
        .and_then(|a| {
            a.write(&dir)?;
            a.status()
        });
    if let Err(e) = &result {
        let body = serde_json::to_string_pretty(&e.to_json(Some(path))).unwrap() + "\n";
        let _ = std::fs::create_dir_all(&dir).and_then(|_| std::fs::write(dir.join("error.json"), body));
    }
    Outcome {
        path: path.to_path_buf(),
        dir,
        result,
    }
}

/// Runs every scenario in parallel. Results come back in input order.
pub fn run(paths: &[PathBuf], out: &Path, opts: &Options) -> Vec<Outcome> {
    paths.par_iter().map(|p| one(p, out, opts)).collect()
}

/// The most severe exit code of the batch.
pub fn exit_code(outcomes: &[Outcome]) -> u8 {
    outcomes.iter().map(Outcome::exit_code).max().unwrap_or(0)
}
