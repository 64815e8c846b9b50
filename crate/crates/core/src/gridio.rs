//! Text serialization for sampled grids.
//!
//! Floats are written with 17 significant digits so every value survives a
//! text round trip bit for bit. CSV files always start with a header row;
//! JSON envelopes are `{"N": …, "kind": …, "data": [[a, b, re, im], …]}`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::PrimePhaseSpace;
use crate::operator::C64;
use crate::weyl::{FunctionKind, PhaseSpaceFunction};

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
}

fn parse_i64(s: &str) -> Result<i64> {
    s.trim()
        .parse::<i64>()
        .map_err(|e| Error::InvalidArgument(format!("bad integer {s:?}: {e}")))
}

fn axis_names(kind: &FunctionKind) -> (&'static str, &'static str) {
    if kind.is_characteristic() {
        ("u", "v")
    } else {
        ("p", "q")
    }
}

impl PhaseSpaceFunction {
    /// CSV with header `p,q,re,im` (`u,v,re,im` for characteristic grids),
    /// rows sorted by symmetric residues.
    pub fn to_csv(&self) -> String {
        let (a, b) = axis_names(self.kind());
        let mut out = format!("{a},{b},re,im\n");
        for (x, y, z) in self.entries() {
            let _ = writeln!(out, "{x},{y},{},{}", fmt_f64(z.re), fmt_f64(z.im));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = format!(
            "{{\"N\":{},\"kind\":{},\"data\":[",
            self.space().modulus(),
            Value::String(self.kind().label())
        );
        for (i, (x, y, z)) in self.entries().into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "[{x},{y},{},{}]", fmt_f64(z.re), fmt_f64(z.im));
        }
        out.push_str("]}\n");
        out
    }

    pub fn from_csv(text: &str, kind: FunctionKind) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty CSV".into()))?;
        let (a, b) = axis_names(&kind);
        if header.trim() != format!("{a},{b},re,im") {
            return Err(Error::InvalidArgument(format!("unexpected CSV header {header:?}")));
        }
        let mut rows = Vec::new();
        for line in lines {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::InvalidArgument(format!("expected 4 columns in {line:?}")));
            }
            rows.push((parse_i64(cols[0])?, parse_i64(cols[1])?, C64::new(parse_f64(cols[2])?, parse_f64(cols[3])?)));
        }
        let n = (rows.len() as f64).sqrt().round() as u64;
        assemble(n, rows, kind)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad JSON: {e}")))?;
        let n = v["N"].as_u64().ok_or_else(|| Error::InvalidArgument("missing N".into()))?;
        let kind = FunctionKind::parse(v["kind"].as_str().ok_or_else(|| Error::InvalidArgument("missing kind".into()))?)?;
        let data = v["data"].as_array().ok_or_else(|| Error::InvalidArgument("missing data".into()))?;
        let mut rows = Vec::with_capacity(data.len());
        for row in data {
            let r = row.as_array().filter(|r| r.len() == 4).ok_or_else(|| Error::InvalidArgument("data rows need 4 entries".into()))?;
            let int = |x: &Value| x.as_i64().ok_or_else(|| Error::InvalidArgument("non-integer coordinate".into()));
            let flt = |x: &Value| x.as_f64().ok_or_else(|| Error::InvalidArgument("non-numeric value".into()));
            rows.push((int(&r[0])?, int(&r[1])?, C64::new(flt(&r[2])?, flt(&r[3])?)));
        }
        assemble(n, rows, kind)
    }
}

fn assemble(n: u64, rows: Vec<(i64, i64, C64)>, kind: FunctionKind) -> Result<PhaseSpaceFunction> {
    let space = PrimePhaseSpace::new(n)?;
    let n = space.modulus();
    if rows.len() != n * n {
        return Err(Error::DimMismatch(format!("{} rows for an N = {n} grid", rows.len())));
    }
    let mut grid = DMatrix::from_element(n, n, C64::new(f64::NAN, 0.0));
    for (a, b, z) in rows {
        grid[(space.residue(a).index(n), space.residue(b).index(n))] = z;
    }
    if grid.iter().any(|z| z.re.is_nan()) {
        return Err(Error::InvalidArgument("grid has missing points".into()));
    }
    PhaseSpaceFunction::new(&space, grid, kind)
}
