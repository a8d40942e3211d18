//! `--config` run files.
//!
//! ```json
//! {
//!   "command": "design",
//!   "output": "fig5a.csv",
//!   "format": "csv",
//!   "parameters": { "mode": "collection", "n": "2:100", "k": 0.5, "ic_uA": 300, "l_dc1_pH": 10 }
//! }
//! ```
//!
//! Parameter keys are the subcommand's long options with `_` for `-`, and
//! physical quantities keep their unit suffix (`ic_uA`, `l_dc3_pH`).
//! Positional arguments use their names (`n`, `H`, `bias` for
//! `tree-verify`). Every parameter becomes the matching command-line
//! argument unless that option was already given.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Arg, CommandFactory};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::args::Cli;
use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    command: Option<String>,
    output: Option<PathBuf>,
    format: Option<String>,
    #[serde(default)]
    parameters: Map<String, Value>,
}

/// Options of the top-level command that take a separate value.
const GLOBAL_VALUED: [&str; 4] = ["--output", "-o", "--format", "--config"];

/// Config key for a long option name.
fn key_for(long: &str) -> String {
    let key = long.replace('-', "_");
    if let Some(stem) = key.strip_suffix("_ua") {
        format!("{stem}_uA")
    } else if let Some(stem) = key.strip_suffix("_ph") {
        format!("{stem}_pH")
    } else {
        key
    }
}

fn given(user: &[String], long: &str, short: Option<char>) -> bool {
    let flag = format!("--{long}");
    let with_value = format!("{flag}=");
    user.iter()
        .any(|a| *a == flag || a.starts_with(&with_value) || short.is_some_and(|c| a.starts_with(&format!("-{c}"))))
}

fn scalar(key: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::String(s) => Ok(s.clone()),
        Value::Array(items) => items
            .iter()
            .map(|i| match i {
                Value::Number(_) | Value::String(_) => scalar(key, i),
                _ => Err(CliError::usage(format!(
                    "config: `{key}` list items must be numbers or strings"
                ))),
            })
            .collect::<CliResult<Vec<_>>>()
            .map(|parts| parts.join(",")),
        _ => Err(CliError::usage(format!(
            "config: `{key}` must be a number, string or list"
        ))),
    }
}

fn read(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn config_path(user: &[String]) -> Option<PathBuf> {
    let mut it = user.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Index of the subcommand token in `user`, if any.
fn subcommand_index(user: &[String]) -> Option<usize> {
    let mut i = 0;
    while i < user.len() {
        let a = &user[i];
        if GLOBAL_VALUED.contains(&a.as_str()) {
            i += 2;
        } else if a.starts_with('-') {
            i += 1;
        } else {
            return Some(i);
        }
    }
    None
}

/// Returns `argv` with the parameters of the `--config` file spliced in.
/// Arguments without a config file pass through unchanged.
pub fn expand(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some((program, rest)) = argv.split_first() else {
        return Ok(argv);
    };
    let Some(user) = rest
        .iter()
        .map(|a| a.to_str().map(str::to_owned))
        .collect::<Option<Vec<_>>>()
    else {
        return Ok(argv);
    };
    let Some(path) = config_path(&user) else {
        return Ok(argv);
    };
    let config = read(&path)?;

    let (head, name, tail) = match (subcommand_index(&user), &config.command) {
        (Some(i), Some(c)) if user[i] != *c => {
            return Err(CliError::usage(format!(
                "config is for `{c}` but the command line runs `{}`",
                user[i]
            )))
        }
        (Some(i), _) => (&user[..i], user[i].clone(), &user[i + 1..]),
        (None, Some(c)) => (&user[..], c.clone(), &[][..]),
        (None, None) => return Err(CliError::usage("no subcommand on the command line or in the config")),
    };
    let mut cli = Cli::command();
    cli.build();
    let Some(sub) = cli.find_subcommand(&name) else {
        return Err(CliError::usage(format!("config: unknown command `{name}`")));
    };

    let mut out = vec![program.clone()];
    out.extend(head.iter().map(OsString::from));
    if let Some(o) = &config.output {
        if !given(&user, "output", Some('o')) {
            out.push("--output".into());
            out.push(o.clone().into_os_string());
        }
    }
    if let Some(f) = &config.format {
        if !given(&user, "format", None) {
            out.push(format!("--format={f}").into());
        }
    }
    out.push(name.clone().into());

    let args: Vec<&Arg> = sub.get_arguments().filter(|a| !a.is_global_set()).collect();
    let mut positional: Vec<(usize, String)> = Vec::new();
    for (key, value) in &config.parameters {
        let arg = args
            .iter()
            .find(|a| match a.get_long() {
                Some(long) => key_for(long) == *key,
                None => a.is_positional() && a.get_id() == key.as_str(),
            })
            .ok_or_else(|| CliError::usage(format!("config: unknown parameter `{key}` for `{name}`")))?;
        if arg.is_positional() {
            positional.push((arg.get_index().unwrap_or(usize::MAX), scalar(key, value)?));
            continue;
        }
        let long = arg.get_long().expect("non-positional arguments are long options");
        if given(tail, long, arg.get_short()) {
            continue;
        }
        if arg.get_action().takes_values() {
            out.push(format!("--{long}={}", scalar(key, value)?).into());
        } else {
            match value {
                Value::Bool(true) => out.push(format!("--{long}").into()),
                Value::Bool(false) => {}
                _ => return Err(CliError::usage(format!("config: `{key}` must be true or false"))),
            }
        }
    }
    positional.sort();
    out.extend(positional.into_iter().map(|(_, v)| OsString::from(v)));
    out.extend(tail.iter().map(OsString::from));
    Ok(out)
}
