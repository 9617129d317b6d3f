//! `--config FILE`: a JSON object of flag values spliced into argv.

use std::fs;

use serde_json::Value;

use crate::error::CliError;

/// Global options taking a value, which may precede the subcommand.
const GLOBAL_WITH_VALUE: [&str; 2] = ["--config", "--out-dir"];

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn to_args(obj: &serde_json::Map<String, Value>) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (key, value) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &Value| -> Result<String, CliError> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(CliError::Usage(format!(
                    "config key `{key}`: unsupported value {other}"
                ))),
            }
        };
        match value {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                out.push(flag);
                for v in items {
                    out.push(scalar(v)?);
                }
            }
            v => {
                out.push(flag);
                out.push(scalar(v)?);
            }
        }
    }
    Ok(out)
}

/// Insert config-derived flags right after the subcommand path so that
/// flags given on the command line override them.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read config {path}: {e}")))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {path} is not valid JSON: {e}")))?;
    let Value::Object(obj) = value else {
        return Err(CliError::Usage(format!("config {path} must hold a JSON object")));
    };
    let extra = to_args(&obj)?;
    let mut at = 1;
    while at < argv.len() {
        let a = &argv[at];
        if GLOBAL_WITH_VALUE.contains(&a.as_str()) {
            at += 2;
        } else if a.starts_with('-') {
            if GLOBAL_WITH_VALUE.iter().any(|g| a.starts_with(&format!("{g}="))) {
                at += 1;
            } else {
                break;
            }
        } else {
            at += 1;
        }
    }
    let at = at.min(argv.len());
    let mut out = argv[..at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}
