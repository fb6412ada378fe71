//! Deterministic text output: CSV with 17-significant-digit floats and
//! stable-order JSON.

use std::io::Write;
use std::path::Path;

/// Full-precision float text; identical runs produce identical bytes.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write `content` to `path`, or stdout when no path is given.
pub fn emit(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, content),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
        }
    }
}

/// Assemble a CSV document from a header and rows of formatted fields.
pub fn csv(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut doc = String::from(header);
    doc.push('\n');
    for row in rows {
        doc.push_str(&row.join(","));
        doc.push('\n');
    }
    doc
}
