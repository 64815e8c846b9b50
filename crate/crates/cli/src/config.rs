//! `--config` files: a JSON object whose keys are flag names (with `_` or
//! `-`). Keys whose flag also appears on the command line are dropped, so
//! flags win. An optional `"command"` key names the subcommand when the
//! command line omits it.

use std::ffi::OsString;
use std::path::Path;

use serde_json::Value;

use crate::failure::Failure;

/// Removes `--config PATH` / `--config=PATH` from `args`, returning the path.
fn take_config(args: &mut Vec<OsString>) -> Result<Option<OsString>, Failure> {
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy().into_owned();
        if s == "--config" {
            if i + 1 >= args.len() {
                return Err(Failure::validation("--config needs a path"));
            }
            let path = args.remove(i + 1);
            args.remove(i);
            return Ok(Some(path));
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            args.remove(i);
            return Ok(Some(rest.into()));
        }
        i += 1;
    }
    Ok(None)
}

fn flag_args(obj: &serde_json::Map<String, Value>, given: &[OsString]) -> Result<Vec<OsString>, Failure> {
    let mut out = Vec::new();
    for (key, value) in obj {
        if key == "command" {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let overridden = given.iter().any(|a| {
            let a = a.to_string_lossy();
            a == flag || a.starts_with(&format!("{flag}="))
        });
        if overridden {
            continue;
        }
        match value {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => {
                out.push(flag.into());
                out.push(n.to_string().into());
            }
            Value::String(s) => {
                out.push(flag.into());
                out.push(s.into());
            }
            _ => return Err(Failure::validation(format!("config key {key:?} must be a scalar"))),
        }
    }
    Ok(out)
}

/// Rewrites `args` with the config file (if any) merged in.
pub fn merge(mut args: Vec<OsString>, subcommands: &[&str]) -> Result<Vec<OsString>, Failure> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::validation(format!("config is not JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Failure::validation("config must be a JSON object"))?;

    let given = args.get(1).map(|a| a.to_string_lossy().into_owned());
    let (command, rest_from) = match given {
        Some(c) if subcommands.contains(&c.as_str()) => (c, 2),
        _ => match obj.get("command").and_then(Value::as_str) {
            Some(c) => (c.to_string(), 1),
            None => return Err(Failure::validation("no subcommand on the command line or in the config")),
        },
    };
    let rest: Vec<OsString> = args[rest_from..].to_vec();
    let mut merged = vec![args[0].clone(), command.into()];
    merged.extend(flag_args(obj, &rest)?);
    merged.extend(rest);
    Ok(merged)
}
