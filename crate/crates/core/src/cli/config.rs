//! `--config FILE`: a JSON object whose keys mirror flag names. Entries
//! whose flag already appears on the command line are skipped; the rest are
//! appended as `--key value`.

use std::collections::BTreeSet;
use std::ffi::OsString;

use serde_json::Value;

fn config_path(args: &[OsString]) -> Result<Option<String>, String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it
                .next()
                .map(|p| Some(p.to_string_lossy().into_owned()))
                .ok_or_else(|| "--config needs a file path".to_string());
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Ok(Some(p.to_string()));
        }
    }
    Ok(None)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Null | Value::Bool(_) | Value::Array(_) | Value::Object(_) => None,
    }
}

pub(crate) fn merge(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config `{path}`: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        format!("config `{path}` at line {}, column {}: {e}", e.line(), e.column())
    })?;
    let Value::Object(map) = value else {
        return Err(format!("config `{path}` must be a JSON object"));
    };
    let given: BTreeSet<String> = args
        .iter()
        .skip(1)
        .filter_map(|a| {
            let a = a.to_string_lossy();
            a.strip_prefix("--").map(|f| f.split('=').next().unwrap_or("").to_string())
        })
        .collect();
    for (key, v) in map {
        let flag = key.replace('_', "-");
        if flag == "config" || given.contains(&flag) {
            continue;
        }
        let mut push = |val: Option<String>| {
            args.push(format!("--{flag}").into());
            if let Some(val) = val {
                args.push(val.into());
            }
        };
        match &v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => push(None),
            Value::String(_) | Value::Number(_) => push(scalar(&v)),
            Value::Array(items) => {
                for item in items {
                    let s = scalar(item).ok_or_else(|| format!("config key `{key}`: array entries must be strings or numbers"))?;
                    push(Some(s));
                }
            }
            Value::Object(inner) if flag == "param" => {
                for (name, pv) in inner {
                    let s = scalar(pv).ok_or_else(|| format!("config key `param.{name}` must be a number"))?;
                    push(Some(format!("{name}={s}")));
                }
            }
            Value::Object(_) => push(Some(v.to_string())),
        }
    }
    Ok(args)
}
