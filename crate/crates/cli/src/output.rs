use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::Value;
use weyl_lattice::gridio::fmt_f64;

use crate::failure::Failure;

/// Writes `text` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let fail = |e: &dyn std::fmt::Display| Failure::io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| fail(&e))?;
    tmp.write_all(text.as_bytes()).map_err(|e| fail(&e))?;
    tmp.as_file().sync_all().map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}

/// To `path` if given, else stdout.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => write_atomic(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::io(format!("stdout: {e}")))
        }
    }
}

/// Pretty JSON with a trailing newline; map keys come out sorted.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// `row,col,re,im` for every entry.
pub fn matrix_csv(m: &DMatrix<Complex64>) -> String {
    let mut out = String::from("row,col,re,im\n");
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            let _ = writeln!(out, "{r},{c},{},{}", fmt_f64(z.re), fmt_f64(z.im));
        }
    }
    out
}

/// `{"dim", "label", "data": [[row, col, re, im], …]}`.
pub fn matrix_json(label: &str, m: &DMatrix<Complex64>) -> Value {
    let data: Vec<Value> = (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .map(|(r, c)| serde_json::json!([r, c, m[(r, c)].re, m[(r, c)].im]))
        .collect();
    serde_json::json!({ "dim": m.nrows(), "label": label, "data": data })
}

/// Two-column `quantity,value` CSV for scalar summaries.
pub fn summary_csv(v: &Value) -> String {
    let mut out = String::from("quantity,value\n");
    if let Value::Object(map) = v {
        for (k, x) in map {
            let cell = match x {
                Value::Number(n) => n.as_f64().map(fmt_f64).unwrap_or_else(|| n.to_string()),
                Value::String(s) => s.clone(),
                other => other.to_string().replace(',', ";"),
            };
            let _ = writeln!(out, "{k},{cell}");
        }
    }
    out
}
