//! JSON and CSV emission.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::{CliError, Common, Format};

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows must serialize to flat objects; the header comes from the first row.
pub fn csv<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let rows: Vec<Value> = rows.iter().map(|r| serde_json::to_value(r).expect("serializable row")).collect();
    let Some(Value::Object(first)) = rows.first() else {
        return Ok(String::new());
    };
    let keys: Vec<&String> = first.keys().collect();
    let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in &rows {
        let line: Vec<String> = keys.iter().map(|k| csv_field(r.get(k.as_str()).unwrap_or(&Value::Null))).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

/// Writes either the JSON document or the CSV rows, depending on the format.
pub fn emit<J: Serialize, R: Serialize>(common: &Common, default: Format, doc: &J, rows: &[R]) -> Result<(), CliError> {
    let text = match common.format.unwrap_or(default) {
        Format::Json => json(doc),
        Format::Csv => csv(rows)?,
    };
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io(e.to_string())),
    }
}
