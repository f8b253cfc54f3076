//! Config files supplying default flags.
//!
//! A config file is either a JSON object or `key=value` lines (`#` starts a
//! comment). Each key names a long flag. The flags are spliced in right after
//! the subcommand, ahead of everything given on the command line, so that the
//! command line wins under `args_override_self`.

use std::ffi::OsString;

/// Global flags that take a value and may precede the subcommand.
const VALUE_FLAGS: [&str; 5] = ["--seed", "--format", "--output", "--threads", "--config"];

pub fn parse_config(text: &str) -> Result<Vec<String>, String> {
    let pairs = if text.trim_start().starts_with('{') {
        parse_json(text)?
    } else {
        parse_lines(text)?
    };
    let mut flags = Vec::new();
    for (key, value) in pairs {
        if key.is_empty() || key.starts_with('-') {
            return Err(format!("config key `{key}` must be a bare flag name"));
        }
        if key == "config" {
            return Err("config files cannot include other config files".into());
        }
        match value.as_str() {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => flags.push(format!("--{key}={value}")),
        }
    }
    Ok(flags)
}

fn parse_lines(text: &str) -> Result<Vec<(String, String)>, String> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(line, l)| {
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| format!("config line {line}: expected `key=value`"))?;
            Ok((k.trim().to_owned(), v.trim().to_owned()))
        })
        .collect()
}

fn parse_json(text: &str) -> Result<Vec<(String, String)>, String> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| format!("config JSON: {e}"))?;
    let obj = value.as_object().ok_or("config JSON must be an object")?;
    obj.iter()
        .map(|(k, v)| {
            let text = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                serde_json::Value::Array(items) => items
                    .iter()
                    .map(|i| match i {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect::<Vec<_>>()
                    .join(","),
                _ => return Err(format!("config key `{k}`: unsupported value")),
            };
            Ok((k.clone(), text))
        })
        .collect()
}

/// The value of `--config` in raw arguments, found before full parsing so
/// that the file may supply required flags.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter().skip(1);
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy();
        if text == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = text.strip_prefix("--config=") {
            return Some(path.into());
        }
    }
    None
}

/// Position of the subcommand token in `args` (skipping the program name and
/// the values of global flags).
pub fn subcommand_index(args: &[OsString]) -> Option<usize> {
    let mut skip_value = false;
    for (i, arg) in args.iter().enumerate().skip(1) {
        let text = arg.to_string_lossy();
        if skip_value {
            skip_value = false;
            continue;
        }
        if text.starts_with('-') {
            skip_value = VALUE_FLAGS.contains(&text.as_ref());
            continue;
        }
        return Some(i);
    }
    None
}

/// `args` with `flags` inserted right after the subcommand and any global
/// flags before it moved behind them.
pub fn splice(args: &[OsString], flags: &[String]) -> Option<Vec<OsString>> {
    let at = subcommand_index(args)?;
    let mut out = vec![args[0].clone(), args[at].clone()];
    out.extend(flags.iter().map(OsString::from));
    out.extend(args[1..at].iter().cloned());
    out.extend(args[at + 1..].iter().cloned());
    Some(out)
}
