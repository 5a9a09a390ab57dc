//! Resolved experiment: potential, geometry and lattice axes, scheme and
//! output location, validated before any computation starts.

use crate::config::RawConfig;
use crate::error::{config_err, CliError, Result};
use crate::output::fmt_g;
use casimir_core::lattice::{LatticeConfig, PotentialSpec};
use casimir_core::renorm::{Provenance, RenormConstants, RenormScheme};
use std::path::PathBuf;

pub const CONSTANTS_ENV: &str = "CASIMIR_CONSTANTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Zero,
    Uniform,
    Bessel,
}

impl PotentialKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Self::Zero),
            "uniform" => Ok(Self::Uniform),
            "bessel" => Ok(Self::Bessel),
            other => Err(config_err("potential.kind", format!("expected zero, uniform or bessel, got `{other}`"))),
        }
    }

    fn as_str(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Uniform => "uniform",
            Self::Bessel => "bessel",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Fixed,
    Free,
}

/// Sweepable parameters, in the order their Cartesian product is taken.
pub const AXES: &[(&str, &str, &str)] = &[
    ("m", "potential", "m"),
    ("alpha", "potential", "alpha"),
    ("x0", "potential", "x0"),
    ("x1", "geometry", "x1"),
    ("x2", "geometry", "x2"),
    ("x3", "geometry", "x3"),
    ("a", "lattice", "a"),
    ("mu", "scheme", "mu"),
];

fn field_of(axis: &str) -> String {
    AXES.iter()
        .find(|(n, _, _)| *n == axis)
        .map(|(_, s, k)| format!("{s}.{k}"))
        .unwrap_or_else(|| axis.to_string())
}

/// One fully specified parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub m: f64,
    pub alpha: f64,
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: Option<f64>,
    pub a: f64,
    pub mu: f64,
}

impl Point {
    pub fn get(&self, axis: &str) -> f64 {
        match axis {
            "m" => self.m,
            "alpha" => self.alpha,
            "x0" => self.x0,
            "x1" => self.x1,
            "x2" => self.x2,
            "x3" => self.x3.unwrap_or(f64::NAN),
            "a" => self.a,
            "mu" => self.mu,
            _ => f64::NAN,
        }
    }

    fn set(&mut self, axis: &str, v: f64) {
        match axis {
            "m" => self.m = v,
            "alpha" => self.alpha = v,
            "x0" => self.x0 = v,
            "x1" => self.x1 = v,
            "x2" => self.x2 = v,
            "x3" => self.x3 = Some(v),
            "a" => self.a = v,
            "mu" => self.mu = v,
            _ => {}
        }
    }
}

/// Points sharing one output file; `rows` varies along the row axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub params: Vec<(String, f64)>,
    pub rows: Vec<Point>,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub raw: RawConfig,
    pub command: String,
    pub potential: PotentialKind,
    pub axes: Vec<(&'static str, Vec<f64>)>,
    pub scheme: SchemeKind,
    pub constants: RenormConstants,
    pub out_dir: PathBuf,
    pub name: String,
    pub row_axis: Option<&'static str>,
}

fn resolve_constants(raw: &RawConfig) -> Result<RenormConstants> {
    let env = std::env::var(CONSTANTS_ENV).ok();
    let (source, field) = match raw.get("scheme", "constants") {
        Some(s) => (s.to_string(), "scheme.constants".to_string()),
        None => (env.unwrap_or_else(|| "pinned".into()), CONSTANTS_ENV.to_string()),
    };
    match source.as_str() {
        "pinned" => Ok(RenormConstants::paper_pinned()),
        "self" => Ok(RenormConstants::self_determined()?),
        "custom" => {
            let c = raw
                .number("scheme", "c_inf")?
                .ok_or_else(|| config_err("scheme.c_inf", "required when constants = custom"))?;
            let l = raw
                .number("scheme", "ln_chi")?
                .ok_or_else(|| config_err("scheme.ln_chi", "required when constants = custom"))?;
            Ok(RenormConstants::new(c, l, Provenance::Custom))
        }
        other => Err(config_err(&field, format!("expected pinned, self or custom, got `{other}`"))),
    }
}

impl Experiment {
    /// Resolve `raw` for `command`. `default_rows` is the row axis used
    /// when `[sweep] rows` is absent; `None` writes one file per point.
    pub fn resolve(raw: RawConfig, command: &str, default_rows: Option<&'static str>) -> Result<Self> {
        let potential = PotentialKind::parse(raw.get("potential", "kind").unwrap_or("bessel"))?;
        let defaults = [
            ("m", Some(0.0)),
            ("alpha", Some(1.0)),
            ("x0", Some(-0.01)),
            ("x1", Some(0.0)),
            ("x2", None),
            ("x3", None),
            ("a", None),
            ("mu", Some(1.0)),
        ];
        let mut axes = Vec::new();
        for ((name, sec, key), (_, default)) in AXES.iter().zip(defaults) {
            match raw.list(sec, key)? {
                Some(v) => axes.push((*name, v)),
                None => {
                    if let Some(d) = default {
                        axes.push((*name, vec![d]));
                    }
                }
            }
        }
        let scheme = match raw.get("scheme", "kind").unwrap_or("fixed") {
            "fixed" => SchemeKind::Fixed,
            "free" => SchemeKind::Free,
            other => return Err(config_err("scheme.kind", format!("expected fixed or free, got `{other}`"))),
        };
        let row_axis = match raw.get("sweep", "rows") {
            None => default_rows,
            Some("none") => None,
            Some(r) => Some(
                AXES.iter()
                    .map(|(n, _, _)| *n)
                    .find(|n| *n == r)
                    .ok_or_else(|| config_err("sweep.rows", format!("unknown axis `{r}`")))?,
            ),
        };
        let constants = resolve_constants(&raw)?;
        let out_dir = PathBuf::from(raw.get("output", "dir").unwrap_or("out"));
        let name = raw.get("output", "name").unwrap_or(command).to_string();
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(config_err("output.name", format!("`{name}` is not a plain file stem")));
        }
        Ok(Self {
            raw,
            command: command.to_string(),
            potential,
            axes,
            scheme,
            constants,
            out_dir,
            name,
            row_axis,
        })
    }

    pub fn axis(&self, name: &str) -> Option<&[f64]> {
        self.axes.iter().find(|(n, _)| *n == name).map(|(_, v)| v.as_slice())
    }

    pub fn require(&self, name: &str) -> Result<()> {
        if self.axis(name).is_none() {
            return Err(config_err(&field_of(name), "required"));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<Point> {
        let mut pts = vec![Point {
            m: 0.0,
            alpha: 1.0,
            x0: -0.01,
            x1: 0.0,
            x2: f64::NAN,
            x3: None,
            a: f64::NAN,
            mu: 1.0,
        }];
        for (name, values) in &self.axes {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p;
                        q.set(name, v);
                        q
                    })
                })
                .collect();
        }
        pts
    }

    /// Split the points into output files.
    pub fn groups(&self) -> Vec<Group> {
        let listed: Vec<&str> = self
            .axes
            .iter()
            .filter(|(n, v)| v.len() > 1 && Some(*n) != self.row_axis)
            .map(|(n, _)| *n)
            .collect();
        let mut groups: Vec<Group> = Vec::new();
        for p in self.points() {
            let params: Vec<(String, f64)> = match self.row_axis {
                Some(_) => listed.iter().map(|n| (n.to_string(), p.get(n))).collect(),
                None => self.axes.iter().map(|(n, _)| (n.to_string(), p.get(n))).collect(),
            };
            let existing = match self.row_axis {
                Some(_) => groups.iter_mut().find(|g| g.params == params),
                None => None,
            };
            match existing {
                Some(g) => g.rows.push(p),
                None => groups.push(Group { params, rows: vec![p] }),
            }
        }
        groups
    }

    pub fn potential_at(&self, p: &Point) -> Result<PotentialSpec> {
        let spec = match self.potential {
            PotentialKind::Zero => Ok(PotentialSpec::Zero),
            PotentialKind::Uniform => PotentialSpec::uniform_mass(p.m),
            PotentialKind::Bessel => PotentialSpec::bessel(p.m, p.alpha, p.x0),
        };
        spec.map_err(|e| match e {
            casimir_core::Error::InvalidParameter { name, reason } => config_err(&field_of(name), reason),
            other => CliError::Config(other.to_string()),
        })
    }

    pub fn scheme_at(&self, p: &Point) -> Result<RenormScheme> {
        match self.scheme {
            SchemeKind::Fixed => Ok(RenormScheme::fixed(self.constants)),
            SchemeKind::Free => RenormScheme::free(p.mu).map_err(|e| config_err("scheme.mu", e)),
        }
    }

    /// Check one interval `[lo, hi]` against the lattice and the potential.
    fn check_interval(&self, p: &Point, lo: (&str, f64), hi: (&str, f64)) -> Result<()> {
        if !(hi.1 > lo.1) {
            return Err(config_err(
                &field_of(hi.0),
                format!("must exceed {} (got {} = {}, {} = {})", field_of(lo.0), lo.0, fmt_g(lo.1), hi.0, fmt_g(hi.1)),
            ));
        }
        LatticeConfig::new(lo.1, hi.1, p.a).map_err(|e| config_err(&field_of(hi.0), e))?;
        if self.potential == PotentialKind::Bessel && p.alpha != 0.5 && !(p.x0 < lo.1) {
            return Err(config_err(
                "potential.x0",
                format!("core at {} must lie left of {} = {}", fmt_g(p.x0), field_of(lo.0), fmt_g(lo.1)),
            ));
        }
        Ok(())
    }

    /// Validate every point. `need_x3` requests the three-wall geometry.
    pub fn validate(&self, need_x3: bool) -> Result<()> {
        self.require("x2")?;
        self.require("a")?;
        if need_x3 {
            self.require("x3")?;
        }
        for p in self.points() {
            if !(p.a > 0.0) {
                return Err(config_err("lattice.a", format!("spacing must be positive, got {}", fmt_g(p.a))));
            }
            self.potential_at(&p)?;
            self.scheme_at(&p)?;
            self.check_interval(&p, ("x1", p.x1), ("x2", p.x2))?;
            if let Some(x3) = p.x3 {
                self.check_interval(&p, ("x2", p.x2), ("x3", x3))?;
            }
        }
        Ok(())
    }

    /// Resolved configuration, one `key = value` line each, for file headers.
    pub fn header(&self) -> Vec<String> {
        let list = |v: &[f64]| v.iter().map(|x| fmt_g(*x)).collect::<Vec<_>>().join(", ");
        let mut h = vec![format!("casimir {} {}", self.command, env!("CARGO_PKG_VERSION"))];
        h.push(format!("potential.kind = {}", self.potential.as_str()));
        for (name, values) in &self.axes {
            h.push(format!("{} = {}", field_of(name), list(values)));
        }
        h.push(format!(
            "scheme.kind = {}",
            match self.scheme {
                SchemeKind::Fixed => "fixed",
                SchemeKind::Free => "free",
            }
        ));
        let c = &self.constants;
        h.push(format!("constants.provenance = {}", c.provenance.as_str()));
        h.push(format!("constants.c_inf = {}", fmt_g(c.c_inf)));
        h.push(format!("constants.ln_chi = {}", fmt_g(c.ln_chi)));
        h.push(format!("constants.ln_tau = {}", fmt_g(c.ln_tau)));
        h.push(format!("sweep.rows = {}", self.row_axis.unwrap_or("none")));
        for (sec, label) in [("spectrum", "vectors"), ("stress", "sites"), ("stress", "renormalized"), ("force", "mode")] {
            if let Some(v) = self.raw.get(sec, label) {
                h.push(format!("{sec}.{label} = {v}"));
            }
        }
        h
    }
}
