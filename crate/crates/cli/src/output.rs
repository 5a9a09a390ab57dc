//! CSV emission: `#` header comments, 12 significant digits, file names
//! keyed by a hash of the resolved configuration.

use crate::error::{CliError, Result};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// `printf("%.12g")`.
pub fn fmt_g(x: f64) -> String {
    const P: i32 = 12;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if exp < -4 || exp >= P {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Parameters that distinguish this file from others of the same run.
    pub params: Vec<(String, f64)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub footer: Vec<String>,
}

impl Table {
    pub fn new(params: Vec<(String, f64)>, columns: &[&str]) -> Self {
        Self {
            params,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn render(&self, header: &[String]) -> String {
        let mut s = String::new();
        for h in header {
            let _ = writeln!(s, "# {h}");
        }
        for (k, v) in &self.params {
            let _ = writeln!(s, "# point.{k} = {}", fmt_g(*v));
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_g(*v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        for f in &self.footer {
            let _ = writeln!(s, "# {f}");
        }
        s
    }
}

fn short_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

fn write(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write every table as `<name>-<hash>.csv` plus `<name>.manifest` listing
/// them in order. Returns the written paths, manifest last.
pub fn write_tables(dir: &Path, name: &str, header: &[String], tables: &[Table]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    let mut manifest = String::new();
    for h in header {
        let _ = writeln!(manifest, "# {h}");
    }
    let _ = writeln!(manifest, "file,params");
    for t in tables {
        let body = t.render(header);
        let file = format!("{name}-{}.csv", short_hash(&body));
        let path = dir.join(&file);
        write(&path, &body)?;
        let params: Vec<String> = t.params.iter().map(|(k, v)| format!("{k}={}", fmt_g(*v))).collect();
        let _ = writeln!(manifest, "{file},{}", params.join(";"));
        written.push(path);
    }
    let path = dir.join(format!("{name}.manifest"));
    write(&path, &manifest)?;
    written.push(path);
    Ok(written)
}
