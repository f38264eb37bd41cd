//! `simulate --sweep FIELD=V1,V2,...`: independent runs, one directory each.

use std::path::Path;

use rayon::prelude::*;
use rdx3_core::pipeline;
use rdx3_core::Error;
use serde::Serialize;
use serde_json::Value;

use crate::output::write_atomic;
use crate::{config_from_value, error_code, write_simulation, EXIT_BLOWUP, EXIT_ERROR, EXIT_OK};

/// Upper bound on sweep parallelism.
pub const THREADS_ENV: &str = "RDX3_THREADS";

#[derive(Serialize)]
struct SweepEntry {
    index: usize,
    value: Value,
    dir: String,
    exit_code: u8,
    error: Option<String>,
    blowup_suspected: Option<bool>,
}

/// Splits `a.b.c=1,2,3` into the path and JSON values (bare words become strings).
pub fn parse_spec(spec: &str) -> rdx3_core::Result<(Vec<String>, Vec<Value>)> {
    let (field, values) =
        spec.split_once('=').ok_or_else(|| Error::config(format!("sweep must look like FIELD=V1,V2; got `{spec}`")))?;
    let path: Vec<String> = field.split('.').map(str::to_string).collect();
    if path.iter().any(String::is_empty) {
        return Err(Error::config(format!("bad sweep field `{field}`")));
    }
    let values: Vec<Value> = values
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string())))
        .collect();
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    Ok((path, values))
}

fn set_path(root: &mut Value, path: &[String], v: Value) -> rdx3_core::Result<()> {
    let mut cur = root;
    for key in &path[..path.len() - 1] {
        let obj = cur.as_object_mut().ok_or_else(|| Error::config("sweep path crosses a non-object"))?;
        cur = obj.entry(key.clone()).or_insert_with(|| Value::Object(Default::default()));
    }
    let obj = cur.as_object_mut().ok_or_else(|| Error::config("sweep path crosses a non-object"))?;
    obj.insert(path[path.len() - 1].clone(), v);
    Ok(())
}

fn threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

pub fn run_sweep(base: &Value, spec: &str, out: &Path) -> rdx3_core::Result<u8> {
    let (path, values) = parse_spec(spec)?;
    let mut configs = Vec::with_capacity(values.len());
    for v in &values {
        let mut cfg = base.clone();
        set_path(&mut cfg, &path, v.clone())?;
        configs.push(config_from_value(&cfg)?);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads())
        .build()
        .map_err(|e| Error::config(format!("cannot start thread pool: {e}")))?;
    let entries: Vec<SweepEntry> = pool.install(|| {
        configs
            .par_iter()
            .zip(values.par_iter())
            .enumerate()
            .map(|(index, (cfg, value))| {
                let name = format!("run_{index:03}");
                let dir = out.join(&name);
                let result = pipeline::run_simulate(cfg).and_then(|sim| {
                    write_simulation(&dir, cfg, &sim)?;
                    Ok(sim.monitor.blowup_suspected)
                });
                let (exit_code, error, blowup) = match result {
                    Ok(true) => (EXIT_BLOWUP, None, Some(true)),
                    Ok(false) => (EXIT_OK, None, Some(false)),
                    Err(e) => (error_code(&e), Some(e.to_string()), None),
                };
                SweepEntry { index, value: value.clone(), dir: name, exit_code, error, blowup_suspected: blowup }
            })
            .collect()
    });
    let index = serde_json::json!({ "field": path.join("."), "runs": entries });
    let mut text = serde_json::to_string_pretty(&index)?;
    text.push('\n');
    write_atomic(&out.join("sweep.json"), text.as_bytes())?;
    print!("{text}");
    let code = if entries.iter().any(|e| e.error.is_some()) {
        entries.iter().map(|e| e.exit_code).filter(|c| *c != EXIT_BLOWUP && *c != EXIT_OK).max().unwrap_or(EXIT_ERROR)
    } else if entries.iter().any(|e| e.exit_code == EXIT_BLOWUP) {
        EXIT_BLOWUP
    } else {
        EXIT_OK
    };
    Ok(code)
}
