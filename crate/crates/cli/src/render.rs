//! Plain-text rendering of a JSON report. Numbers are printed exactly as
//! JSON prints them, so both formats carry the same values.

use serde_json::Value;

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(", "),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", scalar(v)))
            .collect::<Vec<_>>()
            .join(" "),
    }
}

fn is_table(v: &Value) -> bool {
    matches!(v, Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_object))
}

fn table(rows: &[Value], indent: usize, out: &mut String) {
    let mut columns: Vec<&str> = Vec::new();
    for row in rows {
        for k in row.as_object().into_iter().flat_map(|m| m.keys()) {
            if !columns.contains(&k.as_str()) {
                columns.push(k);
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| columns.iter().map(|c| scalar(r.get(c).unwrap_or(&Value::Null))).collect())
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |items: Vec<&str>| {
        let mut s = " ".repeat(indent);
        for (i, item) in items.iter().enumerate() {
            s.push_str(&format!("{item:<w$}", w = widths[i]));
            if i + 1 < items.len() {
                s.push_str("  ");
            }
        }
        s.trim_end().to_string() + "\n"
    };
    out.push_str(&line(columns.clone()));
    for r in &cells {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
}

fn object(map: &serde_json::Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (k, v) in map {
        match v {
            Value::Object(inner) => {
                out.push_str(&format!("{pad}{k}:\n"));
                object(inner, indent + 2, out);
            }
            v if is_table(v) => {
                out.push_str(&format!("{pad}{k}:\n"));
                table(v.as_array().expect("checked"), indent + 2, out);
            }
            v => out.push_str(&format!("{pad}{k}: {}\n", scalar(v))),
        }
    }
}

pub fn render_text(report: &Value) -> String {
    let mut out = String::new();
    match report {
        Value::Object(map) => object(map, 0, &mut out),
        other => {
            out.push_str(&scalar(other));
            out.push('\n');
        }
    }
    out
}
