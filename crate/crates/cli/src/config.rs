//! `key=value` config files.
//!
//! Keys are long flag names without the dashes (`trials=1000`, `N=2`). Lines
//! starting with `#` and blank lines are ignored; `key=true` sets a switch.
//! Entries are spliced into the argument list right after the subcommand
//! path, and only for flags absent from the command line, so flags win.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

const SUBCOMMANDS: [&str; 3] = ["simulate", "ek", "exact"];
const GLOBAL_VALUED: [&str; 2] = ["--threads", "--config"];

pub fn read_entries(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_entries(&text)
}

pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value", i + 1);
        };
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        if k == "config" {
            bail!("config line {}: nested config files are not supported", i + 1);
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Path given by `--config`, if any.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Index just past the subcommand path (`simulate`, `ek`, `exact <oracle>`).
fn insertion_point(args: &[OsString]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if GLOBAL_VALUED.contains(&s.as_ref()) {
            i += 2;
            continue;
        }
        if SUBCOMMANDS.contains(&s.as_ref()) {
            let depth = if s == "exact" { 2 } else { 1 };
            return Some((i + depth).min(args.len()));
        }
        i += 1;
    }
    None
}

/// `args` with config entries spliced in for every flag the user did not
/// pass.
pub fn merge(args: Vec<OsString>, entries: &[(String, String)]) -> Vec<OsString> {
    let Some(at) = insertion_point(&args) else {
        return args;
    };
    let given: BTreeSet<String> = args
        .iter()
        .filter_map(|a| {
            let s = a.to_string_lossy();
            let name = s.strip_prefix("--")?;
            Some(name.split('=').next().unwrap_or(name).to_string())
        })
        .collect();
    let mut extra: Vec<OsString> = Vec::new();
    for (k, v) in entries {
        if given.contains(k) {
            continue;
        }
        match v.as_str() {
            "true" => extra.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                extra.push(format!("--{k}").into());
                extra.push(v.into());
            }
        }
    }
    let mut out = args;
    out.splice(at..at, extra);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn parses_entries() {
        let e = parse_entries("# comment\n\ntrials = 10\n--seed=3\n").unwrap();
        assert_eq!(e, vec![("trials".into(), "10".into()), ("seed".into(), "3".into())]);
        assert!(parse_entries("oops").is_err());
    }

    #[test]
    fn flags_win() {
        let args = os(&["kacroots", "--threads", "2", "simulate", "--trials", "5"]);
        let e = parse_entries("trials=10\nseed=4").unwrap();
        let merged = merge(args, &e);
        assert_eq!(
            merged,
            os(&["kacroots", "--threads", "2", "simulate", "--seed", "4", "--trials", "5"])
        );
    }

    #[test]
    fn nested_subcommand() {
        let args = os(&["kacroots", "exact", "double-root", "--n", "3"]);
        let merged = merge(args, &parse_entries("N=2").unwrap());
        assert_eq!(merged, os(&["kacroots", "exact", "double-root", "--N", "2", "--n", "3"]));
    }

    #[test]
    fn finds_config_path() {
        assert_eq!(config_path(&os(&["k", "ek", "--config=a.cfg"])), Some("a.cfg".into()));
        assert_eq!(config_path(&os(&["k", "--config", "b", "ek"])), Some("b".into()));
        assert_eq!(config_path(&os(&["k", "ek"])), None);
    }
}
