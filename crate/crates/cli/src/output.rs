//! Report files and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use kac_core::Rational;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::parse::render_rational;

/// Version of the CSV column layouts.
pub const CSV_VERSION: u32 = 1;
pub const MANIFEST_SCHEMA: &str = "kacroots-manifest/1";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        write!(s, "{b:02x}").expect("writing to a String");
    }
    s
}

/// Float cell: fixed ten decimals, empty when absent.
pub fn fixed(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.10}"),
        Some(v) => v.to_string(),
        None => String::new(),
    }
}

/// Float cell in scientific notation, empty when absent.
pub fn sci(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

/// `{key: "n/d", key_float: value}`.
pub fn put_rational(obj: &mut Map<String, Value>, key: &str, q: &Rational) {
    obj.insert(key.into(), Value::String(render_rational(q)));
    obj.insert(format!("{key}_float"), json!(num_traits::ToPrimitive::to_f64(q)));
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

/// Collects output files for one run and writes the manifest last.
pub struct Run {
    dir: PathBuf,
    started: Instant,
    outputs: Vec<(String, String, usize)>,
}

impl Run {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), started: Instant::now(), outputs: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push((name.to_string(), sha256_hex(contents.as_bytes()), contents.len()));
        Ok(())
    }

    pub fn finish(
        self,
        subcommand: &str,
        parameters: &impl Serialize,
        seed: Option<u64>,
        threads: usize,
        argv: &[String],
    ) -> Result<()> {
        let outputs: Vec<Value> = self
            .outputs
            .iter()
            .map(|(f, h, n)| json!({ "file": f, "sha256": h, "bytes": n }))
            .collect();
        let manifest = json!({
            "schema": MANIFEST_SCHEMA,
            "tool": "kacroots",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": subcommand,
            "parameters": serde_json::to_value(parameters)?,
            "seed": seed,
            "threads": threads,
            "argv": argv,
            "csv_version": CSV_VERSION,
            "duration_seconds": self.started.elapsed().as_secs_f64(),
            "outputs": outputs,
        });
        let path = self.dir.join("manifest.json");
        fs::write(&path, json_text(&manifest)).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
