//! CSV and JSON emission with a provenance header.
//!
//! CSV files open with `# key: value` lines naming the tool version, the
//! SHA-256 of the configuration that produced them and the conventions in
//! force; JSON reports carry the same block under `"provenance"`. Numbers are
//! printed in shortest round-trip form so identical inputs give identical bytes.

use std::fmt::LowerExp;
use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::scalar::Real;

pub const TOOL: &str = "quantum-ratio";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Conventions shared by every output.
pub fn default_conventions() -> Vec<String> {
    vec![
        "size = 2 x standard deviation of |psi|^2".into(),
        "mu is the magnetic moment as given, in J/T".into(),
        "hbar restored in all evolution equations".into(),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub conventions: Vec<String>,
}

impl Provenance {
    pub fn new(config_text: &str) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            config_hash: config_hash(config_text),
            conventions: default_conventions(),
        }
    }

    pub fn with_conventions(mut self, extra: impl IntoIterator<Item = String>) -> Self {
        for c in extra {
            if !self.conventions.contains(&c) {
                self.conventions.push(c);
            }
        }
        self
    }

    pub fn header_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("# tool: {} {}", self.tool, self.version),
            format!("# config_sha256: {}", self.config_hash),
        ];
        out.extend(self.conventions.iter().map(|c| format!("# convention: {c}")));
        out
    }
}

/// Hex SHA-256 of the configuration text.
pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Write header lines, a column row and the data rows.
pub fn write_csv<W, I, R>(mut w: W, prov: &Provenance, columns: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    for line in prov.header_lines() {
        writeln!(w, "{line}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(columns)?;
    for row in rows {
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn csv_string<I, R>(prov: &Provenance, columns: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut buf = Vec::new();
    write_csv(&mut buf, prov, columns, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
pub fn fmt_num<T: Real + LowerExp>(x: T) -> String {
    let a = x.abs().to_f64_lossy();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn fmt_row<T: Real + LowerExp, const N: usize>(row: [T; N]) -> Vec<String> {
    row.iter().map(|&x| fmt_num(x)).collect()
}

#[derive(Serialize)]
struct Envelope<'a, S: Serialize> {
    provenance: &'a Provenance,
    report: &'a S,
}

/// One JSON object: `{"provenance": ..., "report": ...}`.
pub fn json_string<S: Serialize>(prov: &Provenance, report: &S) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        provenance: prov,
        report,
    })?;
    s.push('\n');
    Ok(s)
}
