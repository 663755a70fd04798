//! Merges a JSON config file into the argument list.
//!
//! Keys become long flags inserted right after the subcommand, skipping any
//! flag already given on the command line. An optional `"command"` key
//! supplies the subcommand when none is given.

use std::path::PathBuf;

use serde_json::Value;

use crate::CliError;

pub fn expand(mut argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = take_config(&mut argv)? else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Read { path: path.clone(), source })?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config { path: path.clone(), reason: e.to_string() })?;
    let Value::Object(map) = value else {
        return Err(CliError::Config { path, reason: "expected a JSON object".into() });
    };

    let mut sub_end = 1;
    while sub_end < argv.len() && !argv[sub_end].starts_with('-') {
        sub_end += 1;
    }
    if sub_end == 1 {
        if let Some(cmd) = map.get("command") {
            let words: Vec<String> = match cmd {
                Value::String(s) => s.split_whitespace().map(String::from).collect(),
                Value::Array(items) => items.iter().filter_map(|v| v.as_str().map(String::from)).collect(),
                _ => return Err(CliError::Config { path, reason: "\"command\" must be a string or array".into() }),
            };
            sub_end += words.len();
            argv.splice(1..1, words);
        }
    }

    let given: Vec<&str> = argv[sub_end..]
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split_once('=').map_or(a, |(k, _)| k))
        .collect();
    let mut extra = Vec::new();
    for (key, v) in &map {
        let flag = key.trim_start_matches('-');
        if key == "command" || flag == "config" || given.contains(&flag) {
            continue;
        }
        match v {
            Value::Null | Value::Bool(false) => {}
            Value::Bool(true) => extra.push(format!("--{flag}")),
            other => {
                let text = render(other).ok_or_else(|| CliError::Config {
                    path: path.clone(),
                    reason: format!("unsupported value for {key:?}"),
                })?;
                extra.push(format!("--{flag}"));
                extra.push(text);
            }
        }
    }
    argv.splice(sub_end..sub_end, extra);
    Ok(argv)
}

fn take_config(argv: &mut Vec<String>) -> Result<Option<PathBuf>, CliError> {
    let mut found = None;
    let mut i = 1;
    while i < argv.len() {
        if argv[i] == "--config" {
            if i + 1 >= argv.len() {
                return Err(CliError::Usage("--config needs a file path".into()));
            }
            found = Some(PathBuf::from(argv.remove(i + 1)));
            argv.remove(i);
        } else if let Some(p) = argv[i].strip_prefix("--config=") {
            found = Some(PathBuf::from(p));
            argv.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Scalars print as-is, lists join with commas and lists of lists become
/// partition strings such as `1,2|3`.
fn render(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) if items.iter().all(Value::is_array) => {
            let blocks: Option<Vec<String>> = items.iter().map(render).collect();
            Some(blocks?.join("|"))
        }
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(render).collect();
            Some(parts?.join(","))
        }
        _ => None,
    }
}
