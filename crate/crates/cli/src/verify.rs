//! Consolidated invariant checks with measured values. `[verify]
//! ln_chi_offset` shifts `ln chi` before the checks run, so only the checks
//! that depend on it should fail.

use crate::error::{config_err, CliError, Result};
use crate::output::fmt_g;
use casimir_core::artefacts::{f_closed, f_direct, h_closed, h_direct};
use casimir_core::continuum::{e_aw, e_ratio, energy_series_massive, t11_expansion, t11_series_massive, zeta_limit_check};
use casimir_core::forces::{force_global, force_report, Geometry};
use casimir_core::lattice::{build_operator, build_operator_from_values, lattice_integral, LatticeConfig, PotentialSpec};
use casimir_core::observables::{stress_profile_raw, sum_rule_residual, vacuum_energy_raw};
use casimir_core::perturbation::{first_order_t11, first_order_t11_direct, second_order_coefficient, verify_linear_response};
use casimir_core::renorm::{c_infinity_estimate, determine_chi, renormalized_energy, RenormConstants, RenormScheme};
use casimir_core::spectral::{analytic_eigenvalues, solve_eigenvalues, solve_modes, verify_orthonormality};
use std::f64::consts::PI;
use std::time::Instant;

pub const SECTIONS: &[&str] = &["lattice", "spectral", "observables", "artefacts", "renorm", "forces", "perturbation", "continuum"];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub section: &'static str,
    pub name: &'static str,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
    pub seconds: f64,
}

type Probe = fn(&RenormConstants) -> casimir_core::Result<f64>;

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn bessel() -> PotentialSpec {
    PotentialSpec::bessel(1.0, 1.0, -0.01).unwrap()
}

fn stencil(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.25)?;
    let op = build_operator(&cfg, &PotentialSpec::Zero)?;
    let d = op.diag().iter().fold(0.0_f64, |m, x| m.max((x - 32.0).abs()));
    Ok(d.max((op.offdiag() + 16.0).abs()) / 32.0)
}

fn integral(_: &RenormConstants) -> casimir_core::Result<f64> {
    Ok(rel(lattice_integral(&[2.5; 11], 0.1)?, 2.5))
}

fn spectrum(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 1.0 / 200.0)?;
    let vals = solve_eigenvalues(&build_operator(&cfg, &PotentialSpec::Zero)?)?;
    let exact = analytic_eigenvalues(&cfg, 0.0);
    let top = exact.last().copied().unwrap_or(1.0);
    Ok(vals.iter().zip(&exact).fold(0.0, |m, (v, e)| m.max((v - e).abs() / top)))
}

fn orthonormality(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 1.0 / 200.0)?;
    Ok(verify_orthonormality(&solve_modes(&build_operator(&cfg, &bessel())?)?))
}

fn sum_rule(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 2.0, 1.0 / 100.0)?;
    let pot = PotentialSpec::bessel(2.0, 3.0, -0.3)?;
    let sd = solve_modes(&build_operator(&cfg, &pot)?)?;
    let e = vacuum_energy_raw(&sd)?;
    Ok(sum_rule_residual(&stress_profile_raw(&sd, &pot)?, e)?.abs() / e)
}

fn boundary(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 1.0 / 100.0)?;
    let pot = bessel();
    let p = stress_profile_raw(&solve_modes(&build_operator(&cfg, &pot)?)?, &pot)?;
    let n = cfg.sites();
    Ok(rel(p.t00[0], p.t11[0]).max(rel(p.t00[n], p.t11[n])))
}

fn h_identity(_: &RenormConstants) -> casimir_core::Result<f64> {
    let big_n = 500;
    Ok((0..=big_n as i64).fold(0.0, |m, n| m.max((h_direct(big_n, n) - h_closed(big_n, n)).abs())))
}

fn f_identity(_: &RenormConstants) -> casimir_core::Result<f64> {
    let (l, a) = (1.0, 1.0 / 500.0);
    Ok((0..=500).fold(0.0, |m, n| m.max((f_direct(l, n, a) - f_closed(l, n, a)).abs() * a * l)))
}

fn c_inf(c: &RenormConstants) -> casimir_core::Result<f64> {
    Ok((c_infinity_estimate(100_000) - c.c_inf).abs())
}

fn chi_fit(c: &RenormConstants) -> casimir_core::Result<f64> {
    let fit = determine_chi(1.0, &[20.0, 30.0, 40.0, 50.0, 60.0], |l| l / 2000.0)?;
    Ok((fit.ln_chi - c.ln_chi).abs())
}

fn chi_intercept(_: &RenormConstants) -> casimir_core::Result<f64> {
    let fit = determine_chi(1.0, &[20.0, 30.0, 40.0, 50.0, 60.0], |l| l / 2000.0)?;
    Ok(rel(fit.intercept, -0.25))
}

fn scheme_identity(c: &RenormConstants) -> casimir_core::Result<f64> {
    Ok((c.ln_tau - c.ln_chi - 1.0).abs().max((c.ln_tau_tilde - c.ln_chi_tilde - 1.0).abs()))
}

fn lattice_vs_series(c: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 1.0 / 4000.0)?;
    let e = renormalized_energy(&cfg, &PotentialSpec::uniform_mass(1.0)?, &RenormScheme::fixed(*c))?;
    Ok(rel(e, energy_series_massive(1.0, 1.0, c, 100_000)?.value))
}

fn global_local(c: &RenormConstants) -> casimir_core::Result<f64> {
    let pot = PotentialSpec::bessel(0.0, 1.0, -0.01)?;
    let r = force_report(&pot, &Geometry::new(0.0, 1.0, 6.0)?, 1.0 / 300.0, &RenormScheme::fixed(*c))?;
    Ok((r.f_global - r.f_local).abs())
}

fn half_alpha(c: &RenormConstants) -> casimir_core::Result<f64> {
    let pot = PotentialSpec::bessel(0.0, 0.5, -0.01)?;
    let f = force_global(&pot, &Geometry::new(0.0, 1.0, 6.0)?, 1.0 / 300.0, &RenormScheme::fixed(*c))?;
    Ok((f - (-PI / 24.0 + PI / 600.0)).abs())
}

fn mu_invariance(c: &RenormConstants) -> casimir_core::Result<f64> {
    let pot = PotentialSpec::bessel(1.0, 2.0, -0.01)?;
    let g = Geometry::new(0.0, 0.5, 1.5)?;
    let a = 1.0 / 200.0;
    let reports = [RenormScheme::free(1.0)?, RenormScheme::free(10.0)?, RenormScheme::fixed(*c)]
        .iter()
        .map(|s| force_report(&pot, &g, a, s))
        .collect::<casimir_core::Result<Vec<_>>>()?;
    let base = reports[0].f_global.abs();
    Ok(reports[1..].iter().fold(0.0, |m, r| {
        m.max((r.f_global - reports[0].f_global).abs() / base)
            .max((r.f_local - reports[0].f_local).abs() / base)
    }))
}

fn sample_u(cfg: &LatticeConfig) -> Vec<f64> {
    (1..cfg.sites()).map(|n| 2.0 + 3.0 * (0.7 * n as f64).sin().powi(2)).collect()
}

fn response_energy(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.05)?;
    Ok(verify_linear_response(&cfg, &sample_u(&cfg), 7)?.energy_rel_error())
}

fn response_t11(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.05)?;
    Ok(verify_linear_response(&cfg, &sample_u(&cfg), 7)?.t11_rel_error())
}

fn two_routes(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.05)?;
    let u = sample_u(&cfg);
    let mut worst = 0.0_f64;
    for n in 1..cfg.sites() {
        let d = first_order_t11_direct(&cfg, &u, n)?;
        worst = worst.max((d - first_order_t11(&cfg, &u, n)?).abs() / d.abs().max(1.0));
    }
    Ok(worst)
}

fn second_order(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.05)?;
    let u = vec![1.0; cfg.interior()];
    Ok(second_order_coefficient(&cfg, &u, &[0.002, 0.004, 0.006, 0.008, 0.01])?.residual)
}

fn bessel_sum(c: &RenormConstants) -> casimir_core::Result<f64> {
    Ok((e_ratio(1.0, c, 100_000)? - e_aw(1.0)?).abs())
}

fn expansion(c: &RenormConstants) -> casimir_core::Result<f64> {
    Ok((t11_series_massive(1.0, 1.0, c, 100_000)?.value - t11_expansion(1.0, 1.0, c)?).abs())
}

fn zeta_limit(_: &RenormConstants) -> casimir_core::Result<f64> {
    Ok(zeta_limit_check(3.0, 10_000)?.abs())
}

fn potential_diagonal(_: &RenormConstants) -> casimir_core::Result<f64> {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.1)?;
    let u: Vec<f64> = (1..10).map(|n| n as f64).collect();
    let op = build_operator_from_values(&cfg, &u)?;
    let expect: Vec<f64> = u.iter().map(|x| 200.0 + x).collect();
    Ok(op.diag().iter().zip(&expect).fold(0.0, |m, (d, e)| m.max(rel(*d, *e))))
}

const CHECKS: &[(&str, &str, f64, Probe)] = &[
    ("lattice", "stencil", 1e-15, stencil),
    ("lattice", "potential_on_diagonal", 1e-15, potential_diagonal),
    ("lattice", "integral_of_constant", 1e-14, integral),
    ("spectral", "free_spectrum", 1e-13, spectrum),
    ("spectral", "orthonormality", 1e-12, orthonormality),
    ("observables", "energy_sum_rule", 1e-12, sum_rule),
    ("observables", "boundary_t00_equals_t11", 1e-12, boundary),
    ("artefacts", "h_closed_form", 1e-12, h_identity),
    ("artefacts", "f_closed_form", 1e-12, f_identity),
    ("renorm", "c_inf", 5e-4, c_inf),
    ("renorm", "ln_chi_fit", 3e-3, chi_fit),
    ("renorm", "fit_intercept", 2e-2, chi_intercept),
    ("renorm", "ln_tau_identity", 1e-14, scheme_identity),
    ("renorm", "lattice_vs_series_energy", 1e-4, lattice_vs_series),
    ("forces", "global_vs_local", 5e-4, global_local),
    ("forces", "free_field_limit", 1e-3, half_alpha),
    ("forces", "scale_invariance", 1e-10, mu_invariance),
    ("perturbation", "energy_linear_response", 1e-6, response_energy),
    ("perturbation", "t11_linear_response", 1e-6, response_t11),
    ("perturbation", "t11_two_routes", 1e-10, two_routes),
    ("perturbation", "second_order_fit", 1e-4, second_order),
    ("continuum", "series_vs_bessel_sum", 1e-5, bessel_sum),
    ("continuum", "small_mass_expansion", 1e-8, expansion),
    ("continuum", "zeta_limit", 1e-6, zeta_limit),
];

pub fn parse_sections(spec: Option<&str>) -> Result<Vec<&'static str>> {
    let Some(spec) = spec else {
        return Ok(SECTIONS.to_vec());
    };
    spec.split(',')
        .map(|s| {
            let s = s.trim();
            SECTIONS
                .iter()
                .copied()
                .find(|x| *x == s)
                .ok_or_else(|| config_err("verify.sections", format!("unknown section `{s}`")))
        })
        .collect()
}

/// Run the selected checks. A probe that errors counts as a failure with a
/// NaN measurement.
pub fn run(constants: &RenormConstants, sections: &[&str]) -> Vec<Check> {
    CHECKS
        .iter()
        .filter(|(s, ..)| sections.contains(s))
        .map(|&(section, name, bound, probe)| {
            let t = Instant::now();
            let measured = probe(constants).unwrap_or(f64::NAN);
            Check {
                section,
                name,
                measured,
                bound,
                pass: measured <= bound,
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

pub fn render(checks: &[Check], total_seconds: f64) -> String {
    let mut s = format!("{:<13} {:<26} {:>18} {:>10} {:>8}  result\n", "section", "check", "measured", "bound", "seconds");
    for c in checks {
        s.push_str(&format!(
            "{:<13} {:<26} {:>18} {:>10} {:>8.3}  {}\n",
            c.section,
            c.name,
            fmt_g(c.measured),
            fmt_g(c.bound),
            c.seconds,
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    s.push_str(&format!("{} checks, {} failed, {:.2} s\n", checks.len(), failed, total_seconds));
    s
}

pub fn outcome(checks: &[Check]) -> Result<()> {
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(CliError::Verify { failed, total: checks.len() });
    }
    Ok(())
}
