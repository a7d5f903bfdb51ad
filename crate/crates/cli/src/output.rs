use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

pub const SCHEMA: u32 = 1;

/// Header line of every run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub tool: &'static str,
    pub version: &'static str,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub command: &'static str,
    pub params: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub rows: usize,
}

/// Result of one subcommand before emission.
#[derive(Debug, Clone)]
pub struct Emission {
    pub command: &'static str,
    pub params: Value,
    pub seed: Option<u64>,
    pub rows: Vec<Value>,
    /// A check in `rows` did not pass.
    pub failed: bool,
    /// Diagnostics for stderr.
    pub notes: Vec<String>,
}

impl Emission {
    pub fn new(command: &'static str, params: &impl Serialize) -> Result<Self, CliError> {
        Ok(Self {
            command,
            params: serde_json::to_value(params)?,
            seed: None,
            rows: Vec::new(),
            failed: false,
            notes: Vec::new(),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn push(&mut self, row: &impl Serialize) -> Result<(), CliError> {
        self.rows.push(serde_json::to_value(row)?);
        Ok(())
    }

    /// Adds resolved values to the parameter echo.
    pub fn echo(&mut self, key: &str, value: &impl Serialize) -> Result<(), CliError> {
        if let Value::Object(map) = &mut self.params {
            map.insert(key.to_owned(), serde_json::to_value(value)?);
        }
        Ok(())
    }

    pub fn header(&self) -> RunReport {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunReport {
            schema: SCHEMA,
            tool: "ncsq",
            version: env!("CARGO_PKG_VERSION"),
            timestamp,
            command: self.command,
            params: self.params.clone(),
            seed: self.seed,
            rows: self.rows.len(),
        }
    }
}

fn tagged(row: &Value) -> Value {
    match row {
        Value::Object(map) => {
            let mut out = Map::new();
            out.insert("schema".into(), SCHEMA.into());
            out.extend(map.iter().map(|(k, v)| (k.clone(), v.clone())));
            Value::Object(out)
        }
        other => other.clone(),
    }
}

/// Header line followed by one line per row.
pub fn write_jsonl(emission: &Emission, w: &mut impl Write) -> Result<(), CliError> {
    serde_json::to_writer(&mut *w, &emission.header())?;
    writeln!(w)?;
    for row in &emission.rows {
        serde_json::to_writer(&mut *w, &tagged(row))?;
        writeln!(w)?;
    }
    Ok(())
}

/// Scientific notation with 17 significant digits, which reads back exactly.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Flattens nested objects to dotted keys; two-element numeric arrays are
/// complex numbers and become `.re`, `.im`.
pub fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_owned()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(items) if items.len() == 2 && items.iter().all(Value::is_number) => {
            flatten(&key("re"), &items[0], out);
            flatten(&key("im"), &items[1], out);
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::Number(n) => {
            let text = match (n.as_u64(), n.as_i64()) {
                (Some(u), _) => u.to_string(),
                (None, Some(i)) => i.to_string(),
                _ => format_real(n.as_f64().expect("finite JSON number")),
            };
            out.push((prefix.to_owned(), text));
        }
        Value::Null => out.push((prefix.to_owned(), String::new())),
        Value::Bool(b) => out.push((prefix.to_owned(), b.to_string())),
        Value::String(s) => out.push((prefix.to_owned(), csv_quote(s))),
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Header row from the first row's columns, then one line per row.
pub fn write_csv(emission: &Emission, w: &mut impl Write) -> Result<(), CliError> {
    let mut flat = Vec::with_capacity(emission.rows.len());
    for row in &emission.rows {
        let mut cells = Vec::new();
        flatten("", row, &mut cells);
        flat.push(cells);
    }
    let Some(first) = flat.first() else {
        return Ok(());
    };
    let columns: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
    writeln!(w, "{}", columns.join(","))?;
    for cells in &flat {
        let line: Vec<&str> = columns
            .iter()
            .map(|c| cells.iter().find(|(k, _)| k == c).map_or("", |(_, v)| v.as_str()))
            .collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn emit(emission: &Emission, out: Option<&Path>, force_json: bool, stdout: &mut impl Write) -> Result<(), CliError> {
    match out {
        None => write_jsonl(emission, stdout),
        Some(path) => {
            let csv = !force_json && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            if csv {
                write_csv(emission, &mut file)?;
            } else {
                write_jsonl(emission, &mut file)?;
            }
            file.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn flattens_nested_and_complex() {
        let mut out = Vec::new();
        flatten("", &json!({"a": {"b": 1.5}, "z": [0.25, -1.0], "ok": true, "n": 3}), &mut out);
        let keys: Vec<_> = out.iter().map(|(k, _)| k.as_str()).collect();
        assert_eq!(keys, ["a.b", "n", "ok", "z.re", "z.im"]);
        assert_eq!(out[0].1, "1.5000000000000000e0");
    }

    #[test]
    fn strings_with_commas_are_quoted() {
        assert_eq!(csv_quote("a,b"), "\"a,b\"");
        assert_eq!(csv_quote("plain"), "plain");
    }

    proptest! {
        #[test]
        fn real_format_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            prop_assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }
}
