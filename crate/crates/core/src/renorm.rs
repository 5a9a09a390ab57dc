//! Renormalization of the lattice energy and stress tensor.
//!
//! The raw lattice quantities contain a quadratic divergence (`2 l/(pi a^2)`
//! in the energy, `2/(pi a^2)` in the densities), a boundary term (`1/(2a)`
//! in the energy, the artefacts `f` and `h` in the densities) and a
//! logarithmic divergence proportional to `U`. The logarithm needs a scale:
//! either a free constant `mu`, or a scale tied to the local potential,
//! `mu^2 = chi^2 U(x)` for the energy density and `mu^2 = tau^2 U(x)` for the
//! pressure. The latter choice makes the massive energy vanish as `m l -> inf`
//! and fixes `chi` and `tau` numerically.

use crate::artefacts::{f_closed, h_closed};
use crate::error::{invalid, Error, Result};
use crate::lattice::{LatticeConfig, PotentialSpec};
use crate::observables::{energy_from_eigenvalues, StressProfile};
use crate::spectral::{analytic_eigenvalues, solve_eigenvalues};
use crate::summation::NeumaierSum;
use std::f64::consts::PI;

/// Where a set of renormalization constants came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// The published values.
    PaperPinned,
    /// Recomputed by this library from lattice fits.
    SelfDetermined,
    /// Supplied by the caller.
    Custom,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PaperPinned => "paper-pinned",
            Self::SelfDetermined => "self-determined",
            Self::Custom => "custom",
        }
    }
}

/// Limits and renormalization constants shared by lattice and continuum
/// computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormConstants {
    /// `lim_{N -> inf} c(N)`.
    pub c_inf: f64,
    pub ln_chi: f64,
    /// `ln tau = ln chi + 1`.
    pub ln_tau: f64,
    /// `ln chi~ = ln chi + (pi/2) c_inf`.
    pub ln_chi_tilde: f64,
    /// `ln tau~ = ln chi~ + 1`.
    pub ln_tau_tilde: f64,
    pub provenance: Provenance,
}

impl RenormConstants {
    pub const PAPER_C_INF: f64 = 0.52125;
    pub const PAPER_LN_CHI: f64 = -2.579436;
    /// Second published value of `ln chi`, from an independent fit.
    pub const PAPER_LN_CHI_ALT: f64 = -2.579438;

    /// Derive the full set from `c_inf` and `ln chi`.
    pub fn new(c_inf: f64, ln_chi: f64, provenance: Provenance) -> Self {
        let ln_chi_tilde = ln_chi + 0.5 * PI * c_inf;
        Self {
            c_inf,
            ln_chi,
            ln_tau: ln_chi + 1.0,
            ln_chi_tilde,
            ln_tau_tilde: ln_chi_tilde + 1.0,
            provenance,
        }
    }

    pub fn paper_pinned() -> Self {
        Self::new(Self::PAPER_C_INF, Self::PAPER_LN_CHI, Provenance::PaperPinned)
    }

    /// Recompute `c_inf` and `ln chi` from the lattice.
    pub fn self_determined() -> Result<Self> {
        let c_inf = c_infinity_estimate(100_000);
        let fit = determine_chi(1.0, &[20.0, 30.0, 40.0, 50.0, 60.0], |l| l / 4000.0)?;
        Ok(Self::new(c_inf, fit.ln_chi, Provenance::SelfDetermined))
    }

    /// The same constants with `ln chi` shifted and everything rederived.
    pub fn with_ln_chi_offset(&self, offset: f64) -> Self {
        Self::new(self.c_inf, self.ln_chi + offset, Provenance::Custom)
    }
}

impl Default for RenormConstants {
    fn default() -> Self {
        Self::paper_pinned()
    }
}

/// Choice of scale for the logarithmic subtraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenormScheme {
    /// A free constant scale `mu`.
    FreeMu { mu: f64 },
    /// Scale tied to the potential: `chi^2 U` for energies and `T_00`,
    /// `tau^2 U` for `T_11`.
    Fixed(RenormConstants),
}

impl RenormScheme {
    pub fn free(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid("mu", format!("must be positive, got {mu}")));
        }
        Ok(Self::FreeMu { mu })
    }

    pub fn fixed(constants: RenormConstants) -> Self {
        Self::Fixed(constants)
    }

    pub fn label(&self) -> String {
        match self {
            Self::FreeMu { mu } => format!("free-mu(mu={mu})"),
            Self::Fixed(c) => format!("fixed(ln_chi={}, ln_tau={})", c.ln_chi, c.ln_tau),
        }
    }
}

/// How the logarithmic part of the energy subtraction is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogIntegral {
    /// Closed form in the interval endpoints.
    Closed,
    /// Trapezoidal lattice sum over the sites.
    LatticeSum,
}

/// `c(N) = sum_{k=1}^{N-1} 1/(N sin(pi k/2N)) - (2/pi) ln N`.
pub fn compute_c(big_n: usize) -> f64 {
    let nf = big_n as f64;
    let mut s = NeumaierSum::new();
    for k in (1..big_n).rev() {
        s.add(1.0 / (nf * (PI * k as f64 / (2.0 * nf)).sin()));
    }
    s.value() - 2.0 / PI * nf.ln()
}

/// `c_inf` from `c(N)` and `c(2N)`, removing the leading `1/N` correction.
pub fn c_infinity_estimate(big_n: usize) -> f64 {
    2.0 * compute_c(2 * big_n) - compute_c(big_n)
}

/// `int_{x1}^{x2} U dx` in closed form.
pub fn integral_u(pot: &PotentialSpec, x1: f64, x2: f64) -> Result<f64> {
    let l = x2 - x1;
    match *pot {
        PotentialSpec::Zero => Ok(0.0),
        PotentialSpec::UniformMass { m } => Ok(m * m * l),
        PotentialSpec::Bessel { m, x0, .. } => {
            pot.check_interval(x1)?;
            let b = pot.strength();
            Ok(m * m * l + b * l / ((x1 - x0) * (x2 - x0)))
        }
    }
}

/// Closed-form pieces for the Bessel potential on `[x1, x2]`: the mean
/// potential `U_bar` and `g` with `int U ln(U l^2) dx = g / l`.
pub fn bessel_logterm_closed(pot: &PotentialSpec, x1: f64, x2: f64) -> Result<(f64, f64)> {
    let PotentialSpec::Bessel { m, x0, .. } = *pot else {
        return Err(Error::Scheme("closed log term needs a Bessel potential".into()));
    };
    pot.check_interval(x1)?;
    let b = pot.strength();
    let l = x2 - x1;
    let (p, q) = (x1 - x0, x2 - x0);
    let u_bar = m * m + b / (p * q);
    let mut g = -2.0 * b * l * l / (p * q);
    if m > 0.0 && b > 0.0 {
        let sb = b.sqrt();
        g += 4.0 * m * l * sb * ((m * q / sb).atan() - (m * p / sb).atan());
    }
    let edge = |y: f64| -> f64 {
        let s = m * m * y * y + b;
        if s > 0.0 {
            l * (m * m * y * y - b) / y * (l * l * s / (y * y)).ln()
        } else {
            0.0
        }
    };
    g += edge(q) - edge(p);
    Ok((u_bar, g))
}

fn u_log(u: f64, ln_scale: f64, a: f64) -> f64 {
    if u > 0.0 {
        u * (2.0 * ln_scale + (u * a * a).ln())
    } else {
        0.0
    }
}

/// Closed-form logarithmic part of the energy subtraction for the interval
/// `[x1, x2]` at spacing `a`.
pub fn interval_log_term(pot: &PotentialSpec, x1: f64, x2: f64, a: f64, scheme: &RenormScheme) -> Result<f64> {
    let l = x2 - x1;
    match scheme {
        RenormScheme::FreeMu { mu } => Ok(integral_u(pot, x1, x2)? * (mu * a).ln() / (4.0 * PI)),
        RenormScheme::Fixed(c) => {
            if pot.is_uniform() {
                let m = pot.mass();
                Ok(l * u_log(m * m, c.ln_chi, a) / (8.0 * PI))
            } else {
                let (u_bar, g) = bessel_logterm_closed(pot, x1, x2)?;
                Ok(l * u_bar / (4.0 * PI) * (c.ln_chi + (a / l).ln()) + g / (8.0 * PI * l))
            }
        }
    }
}

/// Logarithmic part of the energy subtraction on the interval `cfg`.
pub fn energy_log_term(
    cfg: &LatticeConfig,
    pot: &PotentialSpec,
    scheme: &RenormScheme,
    mode: LogIntegral,
) -> Result<f64> {
    match mode {
        LogIntegral::Closed => interval_log_term(pot, cfg.x_left(), cfg.x_right(), cfg.a(), scheme),
        LogIntegral::LatticeSum => {
            let u = pot.sample(cfg)?;
            let vals: Vec<f64> = match scheme {
                RenormScheme::FreeMu { mu } => {
                    let lg = (mu * cfg.a()).ln() * 2.0;
                    u.iter().map(|&u| u * lg).collect()
                }
                RenormScheme::Fixed(c) => u.iter().map(|&u| u_log(u, c.ln_chi, cfg.a())).collect(),
            };
            Ok(cfg.integrate(&vals)? / (8.0 * PI))
        }
    }
}

/// `E = E_reg - 2 l/(pi a^2) + 1/(2a) + log term`.
pub fn renorm_energy(
    e_reg: f64,
    cfg: &LatticeConfig,
    pot: &PotentialSpec,
    scheme: &RenormScheme,
) -> Result<f64> {
    renorm_energy_with(e_reg, cfg, pot, scheme, LogIntegral::Closed)
}

pub fn renorm_energy_with(
    e_reg: f64,
    cfg: &LatticeConfig,
    pot: &PotentialSpec,
    scheme: &RenormScheme,
    mode: LogIntegral,
) -> Result<f64> {
    let (l, a) = (cfg.length(), cfg.a());
    Ok(e_reg - 2.0 * l / (PI * a * a) + 1.0 / (2.0 * a) + energy_log_term(cfg, pot, scheme, mode)?)
}

/// Raw lattice energy, using the closed-form spectrum when `U` is constant.
pub fn raw_energy(cfg: &LatticeConfig, pot: &PotentialSpec) -> Result<f64> {
    if pot.is_uniform() {
        energy_from_eigenvalues(&analytic_eigenvalues(cfg, pot.mass()))
    } else {
        let op = crate::lattice::build_operator(cfg, pot)?;
        energy_from_eigenvalues(&solve_eigenvalues(&op)?)
    }
}

/// Solve and renormalize the vacuum energy on `cfg`.
pub fn renormalized_energy(cfg: &LatticeConfig, pot: &PotentialSpec, scheme: &RenormScheme) -> Result<f64> {
    renorm_energy(raw_energy(cfg, pot)?, cfg, pot, scheme)
}

/// Amount subtracted from raw `T_11` at site `n` where the potential is `u`.
pub fn t11_subtraction(cfg: &LatticeConfig, n: usize, u: f64, scheme: &RenormScheme) -> f64 {
    let (l, a) = (cfg.length(), cfg.a());
    let log = match scheme {
        RenormScheme::FreeMu { mu } => u * (mu * a).ln() / (4.0 * PI),
        RenormScheme::Fixed(c) => u_log(u, c.ln_tau, a) / (8.0 * PI),
    };
    2.0 / (PI * a * a) + f_closed(l, n as i64, a) + log + u / 8.0 * h_closed(cfg.sites(), n as i64)
}

/// Amount subtracted from raw `T_00` at site `n` where the potential is `u`.
pub fn t00_subtraction(cfg: &LatticeConfig, n: usize, u: f64, scheme: &RenormScheme) -> f64 {
    let (l, a) = (cfg.length(), cfg.a());
    let log = match scheme {
        RenormScheme::FreeMu { mu } => u * (mu * a).ln() / (4.0 * PI),
        RenormScheme::Fixed(c) => u_log(u, c.ln_chi, a) / (8.0 * PI),
    };
    2.0 / (PI * a * a) + f_closed(l, n as i64, a) - log + u / 8.0 * h_closed(cfg.sites(), n as i64)
}

fn check_raw(profile: &StressProfile) -> Result<()> {
    if profile.is_renormalized() {
        Err(Error::Scheme("profile is already renormalized".into()))
    } else {
        Ok(())
    }
}

/// Renormalized `T_11` on all sites.
pub fn renorm_t11(profile: &StressProfile, pot: &PotentialSpec, scheme: &RenormScheme) -> Result<Vec<f64>> {
    check_raw(profile)?;
    let u = pot.sample(&profile.cfg)?;
    Ok(profile
        .t11
        .iter()
        .enumerate()
        .map(|(n, t)| t - t11_subtraction(&profile.cfg, n, u[n], scheme))
        .collect())
}

/// Renormalized `T_00` on all sites.
pub fn renorm_t00(profile: &StressProfile, pot: &PotentialSpec, scheme: &RenormScheme) -> Result<Vec<f64>> {
    check_raw(profile)?;
    let u = pot.sample(&profile.cfg)?;
    Ok(profile
        .t00
        .iter()
        .enumerate()
        .map(|(n, t)| t - t00_subtraction(&profile.cfg, n, u[n], scheme))
        .collect())
}

/// Renormalize both components.
pub fn renorm_profile(profile: &StressProfile, pot: &PotentialSpec, scheme: &RenormScheme) -> Result<StressProfile> {
    Ok(StressProfile {
        cfg: profile.cfg,
        t00: renorm_t00(profile, pot, scheme)?,
        t11: renorm_t11(profile, pot, scheme)?,
        scheme: Some(*scheme),
    })
}

/// Linear fit `E(m, l) = intercept + slope * l` used to fix `chi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiFit {
    pub ln_chi: f64,
    pub intercept: f64,
    pub slope: f64,
    pub max_residual: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Largest tolerated fit residual, relative to `1 + max |E|`.
pub const CHI_FIT_TOLERANCE: f64 = 1e-4;

/// Fit the free-`mu` energy at `mu = m` against `l` for large `m l`. The
/// fixed scheme requires the term linear in `l` to vanish, which gives
/// `ln chi = -4 pi slope / m^2`.
pub fn determine_chi(m: f64, lengths: &[f64], a_rule: impl Fn(f64) -> f64) -> Result<ChiFit> {
    if !(m > 0.0) {
        return Err(invalid("m", "chi fit needs a positive mass"));
    }
    if lengths.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 lengths, got {}", lengths.len())));
    }
    let scheme = RenormScheme::free(m)?;
    let pot = PotentialSpec::uniform_mass(m)?;
    let mut samples = Vec::with_capacity(lengths.len());
    for &l in lengths {
        let cfg = LatticeConfig::new(0.0, l, a_rule(l))?;
        samples.push((l, renormalized_energy(&cfg, &pot, &scheme)?));
    }
    let line = crate::forces::fit_line(&samples)?;
    let scale = 1.0 + samples.iter().fold(0.0_f64, |s, (_, e)| s.max(e.abs()));
    let threshold = CHI_FIT_TOLERANCE * scale;
    if line.max_residual > threshold {
        return Err(Error::FitResidual {
            residual: line.max_residual,
            threshold,
        });
    }
    Ok(ChiFit {
        ln_chi: -4.0 * PI * line.slope / (m * m),
        intercept: line.intercept,
        slope: line.slope,
        max_residual: line.max_residual,
        samples,
    })
}
