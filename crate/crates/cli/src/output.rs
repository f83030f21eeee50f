//! Deterministic number formatting and output sinks.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Shortest text that reads back as `round15(x)`.
pub fn num(x: f64) -> String {
    format!("{:?}", round15(x))
}

/// Rounds every number in a JSON value in place.
pub fn round_json(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                if let Some(r) = serde_json::Number::from_f64(round15(x)) {
                    *n = r;
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

pub fn json_text<T: serde::Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("output serializes");
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("output serializes");
    s.push('\n');
    s
}

/// Writes `text` to `path`, or to standard output when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
