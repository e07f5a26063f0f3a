//! `key = value` config files standing in for command-line flags.
//!
//! Keys are long flag names (`test-fraction` or `test_fraction`). Entries
//! only apply to flags the selected subcommand accepts and that were not
//! given on the command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, ArgMatches, Command};

pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", n + 1);
        };
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        out.insert(key.trim().replace('_', "-"), value.to_owned());
    }
    Ok(out)
}

/// The `--config` value, if any, read straight from the raw arguments.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
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

fn leaf<'a>(mut cmd: &'a Command, mut matches: &ArgMatches) -> Vec<&'a Command> {
    let mut path = vec![cmd];
    while let Some((name, sub)) = matches.subcommand() {
        match cmd.find_subcommand(name) {
            Some(next) => {
                cmd = next;
                matches = sub;
                path.push(cmd);
            }
            None => break,
        }
    }
    path
}

/// Appends `--key value` for every config entry the selected subcommand
/// understands and the command line leaves unset.
pub fn merge(cmd: &Command, args: Vec<OsString>, file: &Path) -> Result<Vec<OsString>> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading config {}", file.display()))?;
    let entries = parse(&text)?;
    let matches = cmd.clone().ignore_errors(true).get_matches_from(args.clone());
    let path = leaf(cmd, &matches);
    let given = |flag: &str| {
        args.iter().any(|a| {
            let s = a.to_string_lossy();
            s == flag || s.starts_with(&format!("{flag}="))
        })
    };
    let mut out = args.clone();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let arg = path
            .iter()
            .flat_map(|c| c.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()));
        let Some(arg) = arg else {
            continue;
        };
        let flag = format!("--{key}");
        if given(&flag) {
            continue;
        }
        match arg.get_action() {
            ArgAction::SetTrue => {
                if value.parse::<bool>().with_context(|| format!("config key {key} expects true or false"))? {
                    out.push(flag.into());
                }
            }
            _ => {
                out.push(flag.into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}
