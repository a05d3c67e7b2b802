//! Command output in text or JSON.

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// A command result: structured data plus optional hand-written text lines.
/// Without text lines the text form is derived from the JSON.
#[derive(Debug)]
pub struct Report {
    json: Value,
    text: Vec<String>,
}

impl Report {
    pub fn new(json: Value) -> Self {
        Self {
            json,
            text: Vec::new(),
        }
    }

    pub fn with_text(json: Value, text: Vec<String>) -> Self {
        Self { json, text }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable report");
                s.push('\n');
                s
            }
            Format::Text if !self.text.is_empty() => {
                self.text.iter().map(|l| format!("{l}\n")).collect()
            }
            Format::Text => {
                let mut out = String::new();
                render_value(&mut out, "", &self.json, 0);
                out
            }
        }
    }
}

fn as_matrix(v: &Value) -> Option<(usize, usize, &Vec<Value>)> {
    let obj = v.as_object()?;
    if obj.len() != 3 {
        return None;
    }
    let rows = obj.get("rows")?.as_u64()? as usize;
    let cols = obj.get("cols")?.as_u64()? as usize;
    let data = obj.get("data")?.as_array()?;
    (data.len() == rows * cols).then_some((rows, cols, data))
}

/// `[re, im]` with at least one float entry; integer pairs are plain lists.
fn is_complex(v: &Value) -> bool {
    v.as_array().is_some_and(|a| {
        a.len() == 2 && a.iter().all(Value::is_number) && a.iter().any(Value::is_f64)
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        Value::Array(a) if is_complex(v) => {
            let (re, im) = (a[0].as_f64().unwrap_or(0.0), a[1].as_f64().unwrap_or(0.0));
            format!("{re:.6e}{im:+.6e}i")
        }
        other => other.to_string(),
    }
}

fn render_value(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    let label = if key.is_empty() {
        String::new()
    } else {
        format!("{key}:")
    };
    if let Some((rows, cols, data)) = as_matrix(v) {
        out.push_str(&format!("{pad}{label}\n"));
        for r in 0..rows {
            let row: Vec<String> = data[r * cols..(r + 1) * cols].iter().map(scalar).collect();
            out.push_str(&format!("{pad}  [{}]\n", row.join(", ")));
        }
        return;
    }
    match v {
        Value::Object(map) => {
            if !key.is_empty() {
                out.push_str(&format!("{pad}{label}\n"));
            }
            let inner = if key.is_empty() { depth } else { depth + 1 };
            for (k, val) in map {
                render_value(out, k, val, inner);
            }
        }
        Value::Array(items) if items.iter().any(|x| x.is_object()) => {
            out.push_str(&format!("{pad}{label}\n"));
            for (i, item) in items.iter().enumerate() {
                render_value(out, &format!("[{i}]"), item, depth + 1);
            }
        }
        Value::Array(items) if !is_complex(v) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{pad}{label} [{}]\n", parts.join(", ")));
        }
        _ => out.push_str(&format!("{pad}{label} {}\n", scalar(v))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_rendering_of_matrices_and_scalars() {
        let r = Report::new(json!({"m": {"rows": 1, "cols": 2, "data": [1, "1/2"]}, "ok": true}));
        assert_eq!(r.render(Format::Text), "m:\n  [1, 1/2]\nok: true\n");
    }

    #[test]
    fn json_rendering_is_stable() {
        let r = Report::new(json!({"b": 1, "a": [0.5, -1.0]}));
        assert_eq!(r.render(Format::Json), r.render(Format::Json));
        assert!(r.render(Format::Json).find("\"a\"") < r.render(Format::Json).find("\"b\""));
    }
}
