//! `key = value` configuration files.
//!
//! Each key names a long flag; its value is used only when the flag is absent
//! from the command line. `true` and `false` toggle bare switches.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() || k == "config" {
            return Err(CliError::Usage(format!("config line {}: bad key {k:?}", i + 1)));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
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

fn has_flag(args: &[OsString], key: &str) -> bool {
    let flag = format!("--{key}");
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        s == flag || s.starts_with(&format!("{flag}="))
    })
}

/// Appends the config file's entries as flags not given explicitly.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("config {}: {e}", Path::new(&path).display())))?;
    let mut out = args.clone();
    for (k, v) in parse(&text)? {
        if has_flag(&args, &k) {
            continue;
        }
        match v.as_str() {
            "false" => {}
            "true" => out.push(format!("--{k}").into()),
            _ => out.push(format!("--{k}={v}").into()),
        }
    }
    Ok(out)
}
