//! Report emission. Text output renders exactly the JSON value.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

pub fn render<T: Serialize>(value: &T, format: Format) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::stage("render", e))?;
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::stage("render", e))?;
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            text(&v, 0, &mut s);
            s
        }
    })
}

pub fn emit<T: Serialize>(value: &T, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let s = render(value, format)?;
    match out {
        Some(path) => std::fs::write(path, s).map_err(|e| CliError::stage("write", format!("{}: {e}", path.display()))),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| scalar(i).is_some() && !i.is_array()) || items.iter().all(is_flat) => {
            Some(format!("[{}]", items.iter().map(|i| scalar(i).expect("flat")).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn is_flat(v: &Value) -> bool {
    matches!(v, Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()))
}

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match scalar(val) {
                    Some(s) => writeln!(out, "{pad}{k}: {s}").expect("string write"),
                    None => {
                        writeln!(out, "{pad}{k}:").expect("string write");
                        text(val, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => writeln!(out, "{pad}- {s}").expect("string write"),
                    None => {
                        writeln!(out, "{pad}-").expect("string write");
                        text(item, indent + 1, out);
                    }
                }
            }
        }
        other => writeln!(out, "{pad}{}", scalar(other).expect("scalar")).expect("string write"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_mirrors_json() {
        let v = json!({"a": 1, "b": [[1, 2], [3, 4]], "c": {"d": "x"}, "e": [{"f": true}]});
        let t = render(&v, Format::Text).unwrap();
        assert_eq!(t, "a: 1\nb: [[1, 2], [3, 4]]\nc:\n  d: x\ne:\n  -\n    f: true\n");
    }

    #[test]
    fn json_round_trips() {
        let v = json!({"n": ["123456789012345678901234567890"], "k": [1, -2]});
        let s = render(&v, Format::Json).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&s).unwrap(), v);
    }
}
