//! Line-oriented experiment files: `[section]` headers, `key = value` lines,
//! `#` or `;` comments. Numbers accept fractions (`1/300`); list fields
//! accept comma-separated items and `lo:step:hi` ranges.

use crate::error::{config_err, CliError, Result};
use std::collections::BTreeMap;

/// Keys accepted in each section.
const SCHEMA: &[(&str, &[&str])] = &[
    ("potential", &["kind", "m", "alpha", "x0"]),
    ("geometry", &["x1", "x2", "x3"]),
    ("lattice", &["a"]),
    ("scheme", &["kind", "mu", "constants", "c_inf", "ln_chi"]),
    ("sweep", &["rows"]),
    ("output", &["dir", "name"]),
    ("spectrum", &["vectors"]),
    ("stress", &["sites", "renormalized"]),
    ("force", &["mode"]),
    ("series", &["quantity", "m", "l", "ml", "x_over_l", "k_max"]),
    ("verify", &["ln_chi_offset", "sections"]),
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), String>,
}

fn check_key(section: &str, key: &str) -> Result<()> {
    match SCHEMA.iter().find(|(s, _)| *s == section) {
        None => Err(CliError::Config(format!("unknown section `[{section}]`"))),
        Some((_, keys)) if !keys.contains(&key) => {
            Err(CliError::Config(format!("unknown key `{section}.{key}`")))
        }
        Some(_) => Ok(()),
    }
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section: Option<String> = None;
        for (i, line) in text.lines().enumerate() {
            let line = match line.find(['#', ';']) {
                Some(p) => &line[..p],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Config(format!("line {}: unterminated section header", i + 1)))?;
                let name = name.trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(CliError::Config(format!("line {}: unknown section `[{name}]`", i + 1)));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let sec = section
                .clone()
                .ok_or_else(|| CliError::Config(format!("line {}: key outside any section", i + 1)))?;
            cfg.insert(&sec, key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn insert(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        check_key(section, key)?;
        self.entries.insert((section.into(), key.into()), value.into());
        Ok(())
    }

    /// Apply a `section.key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (path, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set `{assignment}`: expected section.key=value")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| CliError::Config(format!("--set `{assignment}`: expected section.key=value")))?;
        self.insert(section, key, value.trim())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(&(section.to_string(), key.to_string())).map(String::as_str)
    }

    pub fn number(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.get(section, key)
            .map(|v| parse_number(v).map_err(|e| config_err(&format!("{section}.{key}"), e)))
            .transpose()
    }

    pub fn list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(section, key)
            .map(|v| parse_list(v).map_err(|e| config_err(&format!("{section}.{key}"), e)))
            .transpose()
    }

    pub fn boolean(&self, section: &str, key: &str) -> Result<Option<bool>> {
        self.get(section, key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                other => Err(config_err(&format!("{section}.{key}"), format!("expected true/false, got `{other}`"))),
            })
            .transpose()
    }

    pub fn count(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.get(section, key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| config_err(&format!("{section}.{key}"), format!("expected a non-negative integer, got `{v}`")))
            })
            .transpose()
    }
}

pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((num, den)) => {
            let n: f64 = num.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            let d: f64 = den.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
            if d == 0.0 {
                return Err(format!("`{s}` divides by zero"));
            }
            n / d
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err("empty list item".into());
        }
        let parts: Vec<&str> = item.split(':').collect();
        match parts.len() {
            1 => out.push(parse_number(item)?),
            3 => out.extend(parse_range(parse_number(parts[0])?, parse_number(parts[1])?, parse_number(parts[2])?)?),
            _ => return Err(format!("`{item}` is neither a number nor lo:step:hi")),
        }
    }
    Ok(out)
}

fn parse_range(lo: f64, step: f64, hi: f64) -> std::result::Result<Vec<f64>, String> {
    if !(step > 0.0) || hi < lo {
        return Err(format!("range {lo}:{step}:{hi} needs step > 0 and hi >= lo"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(format!("range {lo}:{step}:{hi} has {count} points"));
    }
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}
