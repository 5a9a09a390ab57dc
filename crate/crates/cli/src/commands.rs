//! Experiment drivers. Each returns the tables to write; points are
//! evaluated on the current rayon pool and collected in input order.

use crate::error::{config_err, Result};
use crate::experiment::{Experiment, Group, Point};
use crate::output::{fmt_g, Table};
use casimir_core::artefacts::{artefact_a, delta, f_closed, h_closed};
use casimir_core::continuum::{
    e_aw, e_ratio, energy_series_massive, t00_profile_ratio, t11_ratio, t11_series_massive,
};
use casimir_core::forces::{extrapolate_to_continuum, force_report, left_force, Geometry};
use casimir_core::lattice::{build_operator, LatticeConfig, PotentialSpec};
use casimir_core::observables::{stress_profile_raw, t11_raw_boundary, Side};
use casimir_core::renorm::{raw_energy, renorm_profile, renormalized_energy, t00_subtraction, t11_subtraction};
use casimir_core::spectral::{solve_edge_modes, solve_eigenvalues, solve_modes};
use rayon::prelude::*;

/// Evaluate `f` on every row of every group in parallel, keeping order.
fn per_row<F>(groups: &[Group], f: F) -> Result<Vec<Vec<Vec<f64>>>>
where
    F: Fn(&Point) -> Result<Vec<f64>> + Sync,
{
    let flat: Vec<(usize, &Point)> = groups
        .iter()
        .enumerate()
        .flat_map(|(i, g)| g.rows.iter().map(move |p| (i, p)))
        .collect();
    let rows = flat.par_iter().map(|(_, p)| f(p)).collect::<Result<Vec<_>>>()?;
    let mut out = vec![Vec::new(); groups.len()];
    for ((i, _), r) in flat.iter().zip(rows) {
        out[*i].push(r);
    }
    Ok(out)
}

fn interval(p: &Point, lo: f64, hi: f64) -> Result<LatticeConfig> {
    Ok(LatticeConfig::new(lo, hi, p.a)?)
}

pub fn spectrum(exp: &Experiment) -> Result<Vec<Table>> {
    exp.validate(false)?;
    let vectors = exp.raw.boolean("spectrum", "vectors")?.unwrap_or(false);
    let groups = exp.groups();
    let solved = groups
        .par_iter()
        .map(|g| -> Result<Vec<Table>> {
            let p = &g.rows[0];
            let pot = exp.potential_at(p)?;
            let op = build_operator(&interval(p, p.x1, p.x2)?, &pot)?;
            let mut spec = Table::new(g.params.clone(), &["k", "eigenvalue"]);
            if !vectors {
                let vals = solve_eigenvalues(&op)?;
                spec.rows = vals.iter().enumerate().map(|(k, v)| vec![(k + 1) as f64, *v]).collect();
                return Ok(vec![spec]);
            }
            let sd = solve_modes(&op)?;
            spec.rows = sd.eigenvalues().iter().enumerate().map(|(k, v)| vec![(k + 1) as f64, *v]).collect();
            let names: Vec<String> = std::iter::once("k".to_string())
                .chain((1..=sd.modes()).map(|n| format!("v_{n}")))
                .collect();
            let cols: Vec<&str> = names.iter().map(String::as_str).collect();
            let mut params = g.params.clone();
            params.push(("eigenvectors".into(), 1.0));
            let mut vecs = Table::new(params, &cols);
            for k in 0..sd.modes() {
                let mut row = vec![(k + 1) as f64];
                row.extend_from_slice(sd.eigenvector(k));
                vecs.rows.push(row);
            }
            Ok(vec![spec, vecs])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(solved.into_iter().flatten().collect())
}

fn profile_rows(exp: &Experiment, p: &Point, pot: &PotentialSpec, lo: f64, hi: f64, region: Option<f64>) -> Result<Vec<Vec<f64>>> {
    let cfg = interval(p, lo, hi)?;
    let sd = solve_modes(&build_operator(&cfg, pot)?)?;
    let mut prof = stress_profile_raw(&sd, pot)?;
    if exp.raw.boolean("stress", "renormalized")?.unwrap_or(true) {
        prof = renorm_profile(&prof, pot, &exp.scheme_at(p)?)?;
    }
    Ok((0..=cfg.sites())
        .map(|n| {
            let mut row = vec![cfg.x(n), prof.t00[n], prof.t11[n]];
            row.extend(region);
            row
        })
        .collect())
}

pub fn stress(exp: &Experiment) -> Result<Vec<Table>> {
    exp.validate(false)?;
    let renormalized = exp.raw.boolean("stress", "renormalized")?.unwrap_or(true);
    let side = match exp.raw.get("stress", "sites").unwrap_or("profile") {
        "profile" => None,
        "left" => Some(Side::Left),
        "right" => Some(Side::Right),
        other => return Err(config_err("stress.sites", format!("expected profile, left or right, got `{other}`"))),
    };
    let groups = exp.groups();
    let Some(side) = side else {
        if exp.row_axis.is_some() {
            return Err(config_err("sweep.rows", "profiles write one file per point; use rows = none"));
        }
        let two = exp.axis("x3").is_some();
        return groups
            .par_iter()
            .map(|g| {
                let p = &g.rows[0];
                let pot = exp.potential_at(p)?;
                let cols: &[&str] = if two { &["x", "t00", "t11", "region"] } else { &["x", "t00", "t11"] };
                let mut t = Table::new(g.params.clone(), cols);
                t.rows = profile_rows(exp, p, &pot, p.x1, p.x2, two.then_some(1.0))?;
                if let Some(x3) = p.x3 {
                    t.rows.extend(profile_rows(exp, p, &pot, p.x2, x3, Some(2.0))?);
                }
                Ok(t)
            })
            .collect();
    };
    let row_axis = exp.row_axis.unwrap_or("a");
    let rows = per_row(&groups, |p| {
        let pot = exp.potential_at(p)?;
        let cfg = interval(p, p.x1, p.x2)?;
        let edge = solve_edge_modes(&build_operator(&cfg, &pot)?)?;
        let raw = t11_raw_boundary(&edge, side)?;
        let n = match side {
            Side::Left => 0,
            Side::Right => cfg.sites(),
        };
        let (t00, t11) = if renormalized {
            let u = pot.at(cfg.x(n))?;
            let s = exp.scheme_at(p)?;
            (raw - t00_subtraction(&cfg, n, u, &s), raw - t11_subtraction(&cfg, n, u, &s))
        } else {
            (raw, raw)
        };
        Ok(vec![p.get(row_axis), -p.a.ln(), t00, t11])
    })?;
    Ok(groups
        .iter()
        .zip(rows)
        .map(|(g, r)| {
            let mut t = Table::new(g.params.clone(), &[row_axis, "neg_ln_a", "t00", "t11"]);
            t.rows = r;
            t
        })
        .collect())
}

pub fn energy(exp: &Experiment) -> Result<Vec<Table>> {
    exp.validate(false)?;
    let row_axis = exp.row_axis.unwrap_or("x2");
    let groups = exp.groups();
    let rows = per_row(&groups, |p| {
        let pot = exp.potential_at(p)?;
        let cfg = interval(p, p.x1, p.x2)?;
        let e = renormalized_energy(&cfg, &pot, &exp.scheme_at(p)?)?;
        Ok(vec![p.get(row_axis), cfg.length(), e, raw_energy(&cfg, &pot)?])
    })?;
    Ok(groups
        .iter()
        .zip(rows)
        .map(|(g, r)| {
            let mut t = Table::new(g.params.clone(), &[row_axis, "l", "e_renormalized", "e_regularized"]);
            t.rows = r;
            t
        })
        .collect())
}

fn extrapolation_footer(t: &mut Table, from: usize) {
    if t.rows.len() < 3 {
        return;
    }
    for c in from..t.columns.len() {
        let pts: Vec<(f64, f64)> = t.rows.iter().map(|r| (r[0], r[c])).collect();
        let line = match extrapolate_to_continuum(&pts) {
            Ok(e) => format!(
                "extrapolation {}: intercept = {}, slope = {}, max_residual = {}",
                t.columns[c],
                fmt_g(e.intercept),
                fmt_g(e.slope),
                fmt_g(e.max_residual)
            ),
            Err(err) => format!("extrapolation {}: {err}", t.columns[c]),
        };
        t.footer.push(line);
    }
}

pub fn force(exp: &Experiment) -> Result<Vec<Table>> {
    let left = match exp.raw.get("force", "mode").unwrap_or("net") {
        "net" => false,
        "left" => true,
        other => return Err(config_err("force.mode", format!("expected net or left, got `{other}`"))),
    };
    exp.validate(!left)?;
    let row_axis = exp.row_axis.unwrap_or("a");
    let groups = exp.groups();
    let rows = per_row(&groups, |p| {
        let pot = exp.potential_at(p)?;
        let scheme = exp.scheme_at(p)?;
        if left {
            let (g, l) = left_force(&pot, p.x1, p.x2, p.a, &scheme)?;
            return Ok(vec![p.get(row_axis), g, l]);
        }
        let geom = Geometry::new(p.x1, p.x2, p.x3.unwrap_or(f64::NAN))?;
        let r = force_report(&pot, &geom, p.a, &scheme)?;
        Ok(vec![
            p.get(row_axis),
            r.f_global,
            r.f_local,
            r.f_left_global,
            r.f_left_local,
            r.f_right_global,
            r.f_right_local,
        ])
    })?;
    let cols: &[&str] = if left {
        &[row_axis, "f_left_global", "f_left_local"]
    } else {
        &[row_axis, "f_global", "f_local", "f_left_global", "f_left_local", "f_right_global", "f_right_local"]
    };
    Ok(groups
        .iter()
        .zip(rows)
        .map(|(g, r)| {
            let mut t = Table::new(g.params.clone(), cols);
            t.rows = r;
            if row_axis == "a" {
                extrapolation_footer(&mut t, 1);
            }
            t
        })
        .collect())
}

pub fn artefacts(exp: &Experiment) -> Result<Vec<Table>> {
    exp.validate(false)?;
    let groups = exp.groups();
    groups
        .par_iter()
        .map(|g| {
            let p = &g.rows[0];
            let cfg = interval(p, p.x1, p.x2)?;
            let (l, a, big_n) = (cfg.length(), p.a, cfg.sites());
            let mut t = Table::new(g.params.clone(), &["n", "x", "h", "f", "delta", "artefact", "remainder"]);
            for n in 0..=big_n as i64 {
                let (h, f) = (h_closed(big_n, n), f_closed(l, n, a));
                let art = artefact_a(p.m, l, n, a);
                let rem = art - (1.0 / (2.0 * a * l) + f + p.m * p.m / 8.0 * h);
                t.rows.push(vec![n as f64, cfg.x(n as usize), h, f, delta(l, n, a), art, rem]);
            }
            Ok(t)
        })
        .collect()
}

/// Continuum series. Axes live in `[series]`: `m` and `l` for `energy` and
/// `t11`, `ml` for the ratios and `t00_profile`, `x_over_l` for the latter.
pub fn series(exp: &Experiment) -> Result<Vec<Table>> {
    let raw = &exp.raw;
    let quantity = raw.get("series", "quantity").unwrap_or("energy");
    let k_max = raw.count("series", "k_max")?.unwrap_or(1000);
    if k_max == 0 {
        return Err(config_err("series.k_max", "must be at least 1"));
    }
    let need = |key: &str| -> Result<Vec<f64>> {
        let v = raw
            .list("series", key)?
            .ok_or_else(|| config_err(&format!("series.{key}"), format!("required for quantity = {quantity}")))?;
        if v.iter().any(|x| *x < 0.0) {
            return Err(config_err(&format!("series.{key}"), "values must be non-negative"));
        }
        Ok(v)
    };
    let c = exp.constants;
    let wrap = |e: casimir_core::Error| crate::error::CliError::from(e);
    match quantity {
        "energy" | "t11" => {
            let (ms, ls) = (need("m")?, need("l")?);
            ms.par_iter()
                .map(|&m| {
                    let mut t = Table::new(vec![("m".into(), m)], &["l", quantity, "tail_bound"]);
                    for &l in &ls {
                        let s = if quantity == "energy" {
                            energy_series_massive(m, l, &c, k_max)
                        } else {
                            t11_series_massive(m, l, &c, k_max)
                        }
                        .map_err(wrap)?;
                        t.rows.push(vec![l, s.value, s.tail_bound]);
                    }
                    Ok(t)
                })
                .collect()
        }
        "energy_ratio" | "t11_ratio" => {
            let ml = need("ml")?;
            let cols: &[&str] = if quantity == "energy_ratio" { &["ml", "e_series", "e_bessel"] } else { &["ml", "t11_ratio"] };
            let rows = ml
                .par_iter()
                .map(|&x| {
                    Ok(if quantity == "energy_ratio" {
                        vec![x, e_ratio(x, &c, k_max)?, e_aw(x)?]
                    } else {
                        vec![x, t11_ratio(x, &c, k_max)?]
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(Vec::new(), cols);
            t.rows = rows;
            Ok(vec![t])
        }
        "t00_profile" => {
            let (ml, xs) = (need("ml")?, need("x_over_l")?);
            ml.par_iter()
                .map(|&m| {
                    let mut t = Table::new(vec![("ml".into(), m)], &["x_over_l", "t00_ratio", "tail_bound"]);
                    for &x in &xs {
                        let s = t00_profile_ratio(m, x, k_max).map_err(wrap)?;
                        t.rows.push(vec![x, s.value, s.tail_bound]);
                    }
                    Ok(t)
                })
                .collect()
        }
        other => Err(config_err(
            "series.quantity",
            format!("expected energy, t11, energy_ratio, t11_ratio or t00_profile, got `{other}`"),
        )),
    }
}

/// Header lines for `series`, which ignores the lattice axes.
pub fn series_header(exp: &Experiment) -> Vec<String> {
    let mut h = vec![format!("casimir series {}", env!("CARGO_PKG_VERSION"))];
    for key in ["quantity", "m", "l", "ml", "x_over_l", "k_max"] {
        if let Some(v) = exp.raw.get("series", key) {
            h.push(format!("series.{key} = {v}"));
        }
    }
    let c = &exp.constants;
    h.push(format!("constants.provenance = {}", c.provenance.as_str()));
    h.push(format!("constants.c_inf = {}", fmt_g(c.c_inf)));
    h.push(format!("constants.ln_chi = {}", fmt_g(c.ln_chi)));
    h
}
