//! Casimir forces on a hard piston at `x2` between walls at `x1` and `x3`.
//!
//! The global force is a finite difference of vacuum energies under a
//! one-site displacement of the piston. Both intervals are evaluated with the
//! piston at `x2` and at `x2 + a`:
//!
//! ```text
//! F = [E(x1, x2) - E(x1, x2 + a) + E(x2, x3) - E(x2 + a, x3)] / a
//! ```
//!
//! The divergent subtractions and, for continuous `U`, the logarithmic term
//! enter both intervals with opposite signs, so the net force needs only raw
//! energies. The local force is the jump in raw `T_11` across the piston.
//!
//! The one-sided forces `F_L` and `F_R` do depend on the renormalization
//! scheme and are computed with the full subtractions.

use crate::error::{invalid, Error, Result};
use crate::lattice::{build_operator, LatticeConfig, PotentialSpec};
use crate::observables::{energy_from_eigenvalues, t11_raw_boundary, Side};
use crate::renorm::{interval_log_term, t11_subtraction, RenormScheme};
use crate::spectral::{solve_edge_modes, solve_eigenvalues, EdgeModes};
use std::f64::consts::PI;

/// Wall, piston and wall positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Geometry {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        if !(x1 < x2 && x2 < x3) {
            return Err(invalid(
                "x2",
                format!("need x1 < x2 < x3, got ({x1}, {x2}, {x3})"),
            ));
        }
        Ok(Self { x1, x2, x3 })
    }
}

/// All force estimates at one lattice spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceReport {
    pub a: f64,
    /// Net force from energy differences.
    pub f_global: f64,
    /// Jump of raw `T_11` across the piston.
    pub f_local: f64,
    pub f_left_global: f64,
    pub f_left_local: f64,
    pub f_right_global: f64,
    pub f_right_local: f64,
}

impl ForceReport {
    /// Jump of the renormalized `T_11` profiles, equal to
    /// `f_left_local + f_right_local`. Differs from `f_local` at `O(a)` when
    /// the two intervals have different lengths.
    pub fn f_local_renormalized(&self) -> f64 {
        self.f_left_local + self.f_right_local
    }
}

/// One-sided forces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitForces {
    pub left_global: f64,
    pub left_local: f64,
    pub right_global: f64,
    pub right_local: f64,
}

struct Solves {
    left: EdgeModes,
    right: EdgeModes,
    e_left: f64,
    e_left_shift: f64,
    e_right: f64,
    e_right_shift: f64,
}

fn configs(geom: &Geometry, a: f64) -> Result<[LatticeConfig; 4]> {
    let Geometry { x1, x2, x3 } = *geom;
    Ok([
        LatticeConfig::new(x1, x2, a)?,
        LatticeConfig::new(x1, x2 + a, a)?,
        LatticeConfig::new(x2, x3, a)?,
        LatticeConfig::new(x2 + a, x3, a)?,
    ])
}

fn solve_all(pot: &PotentialSpec, geom: &Geometry, a: f64) -> Result<Solves> {
    let [l, ls, r, rs] = configs(geom, a)?;
    let left = solve_edge_modes(&build_operator(&l, pot)?)?;
    let right = solve_edge_modes(&build_operator(&r, pot)?)?;
    let e_left = energy_from_eigenvalues(left.eigenvalues())?;
    let e_right = energy_from_eigenvalues(right.eigenvalues())?;
    let e_left_shift = energy_from_eigenvalues(&solve_eigenvalues(&build_operator(&ls, pot)?)?)?;
    let e_right_shift = energy_from_eigenvalues(&solve_eigenvalues(&build_operator(&rs, pot)?)?)?;
    Ok(Solves {
        left,
        right,
        e_left,
        e_left_shift,
        e_right,
        e_right_shift,
    })
}

/// Verify that the scheme-dependent parts of the four energies cancel in the
/// net force.
fn check_cancellation(pot: &PotentialSpec, geom: &Geometry, a: f64, scheme: &RenormScheme) -> Result<()> {
    let [l, ls, r, rs] = configs(geom, a)?;
    let terms = [
        interval_log_term(pot, l.x_left(), l.x_right(), a, scheme)?,
        -interval_log_term(pot, ls.x_left(), ls.x_right(), a, scheme)?,
        interval_log_term(pot, r.x_left(), r.x_right(), a, scheme)?,
        -interval_log_term(pot, rs.x_left(), rs.x_right(), a, scheme)?,
    ];
    let leak = terms.iter().sum::<f64>().abs() / a;
    let scale = terms.iter().map(|t| t.abs()).sum::<f64>() / a;
    if leak > 1e-10 * scale + 1e-12 {
        return Err(Error::CancellationLeak { leak, scale });
    }
    Ok(())
}

fn report_from(pot: &PotentialSpec, geom: &Geometry, a: f64, scheme: &RenormScheme, s: &Solves) -> Result<ForceReport> {
    let u2 = pot.at(geom.x2)?;
    let inc = interval_log_term(pot, geom.x2, geom.x2 + a, a, scheme)? / a;
    let div = 2.0 / (PI * a * a);
    let d_left = (s.e_left - s.e_left_shift) / a;
    let d_right = (s.e_right - s.e_right_shift) / a;

    let t_left = t11_raw_boundary(&s.left, Side::Right)?;
    let t_right = t11_raw_boundary(&s.right, Side::Left)?;
    let lc = s.left.config();
    let rc = s.right.config();
    Ok(ForceReport {
        a,
        f_global: d_left + d_right,
        f_local: t_left - t_right,
        f_left_global: d_left + div - inc,
        f_left_local: t_left - t11_subtraction(lc, lc.sites(), u2, scheme),
        f_right_global: d_right - div + inc,
        f_right_local: -(t_right - t11_subtraction(rc, 0, u2, scheme)),
    })
}

/// Every force estimate at spacing `a`.
pub fn force_report(pot: &PotentialSpec, geom: &Geometry, a: f64, scheme: &RenormScheme) -> Result<ForceReport> {
    check_cancellation(pot, geom, a, scheme)?;
    let s = solve_all(pot, geom, a)?;
    report_from(pot, geom, a, scheme, &s)
}

/// Net force from vacuum energy differences.
pub fn force_global(pot: &PotentialSpec, geom: &Geometry, a: f64, scheme: &RenormScheme) -> Result<f64> {
    check_cancellation(pot, geom, a, scheme)?;
    let [l, ls, r, rs] = configs(geom, a)?;
    let e = |c: &LatticeConfig| -> Result<f64> {
        energy_from_eigenvalues(&solve_eigenvalues(&build_operator(c, pot)?)?)
    };
    Ok((e(&l)? - e(&ls)? + e(&r)? - e(&rs)?) / a)
}

/// Net force from the jump of raw `T_11` across the piston.
pub fn force_local(pot: &PotentialSpec, geom: &Geometry, a: f64) -> Result<f64> {
    let [l, _, r, _] = configs(geom, a)?;
    let left = solve_edge_modes(&build_operator(&l, pot)?)?;
    let right = solve_edge_modes(&build_operator(&r, pot)?)?;
    Ok(t11_raw_boundary(&left, Side::Right)? - t11_raw_boundary(&right, Side::Left)?)
}

/// One-sided forces in the given scheme.
pub fn force_split(pot: &PotentialSpec, geom: &Geometry, a: f64, scheme: &RenormScheme) -> Result<SplitForces> {
    let r = force_report(pot, geom, a, scheme)?;
    Ok(SplitForces {
        left_global: r.f_left_global,
        left_local: r.f_left_local,
        right_global: r.f_right_global,
        right_local: r.f_right_local,
    })
}

/// Global and local force on the right end of `[x1, x2]` from that interval
/// alone, without solving the right-hand interval.
pub fn left_force(pot: &PotentialSpec, x1: f64, x2: f64, a: f64, scheme: &RenormScheme) -> Result<(f64, f64)> {
    let l = LatticeConfig::new(x1, x2, a)?;
    let ls = LatticeConfig::new(x1, x2 + a, a)?;
    let edge = solve_edge_modes(&build_operator(&l, pot)?)?;
    let e = energy_from_eigenvalues(edge.eigenvalues())?;
    let e_shift = energy_from_eigenvalues(&solve_eigenvalues(&build_operator(&ls, pot)?)?)?;
    let inc = interval_log_term(pot, x2, x2 + a, a, scheme)? / a;
    let global = (e - e_shift) / a + 2.0 / (PI * a * a) - inc;
    let local = t11_raw_boundary(&edge, Side::Right)? - t11_subtraction(&l, l.sites(), pot.at(x2)?, scheme);
    Ok((global, local))
}

/// Least-squares straight line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub intercept: f64,
    pub slope: f64,
    pub max_residual: f64,
    pub rms_residual: f64,
}

/// Fit `y = intercept + slope x`.
pub fn fit_line(samples: &[(f64, f64)]) -> Result<Line> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Fit(format!("need at least 2 samples, got {n}")));
    }
    let nf = n as f64;
    let xm = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let ym = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let sxx: f64 = samples.iter().map(|s| (s.0 - xm).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = samples.iter().map(|s| (s.0 - xm) * (s.1 - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let res: Vec<f64> = samples.iter().map(|s| s.1 - intercept - slope * s.0).collect();
    Ok(Line {
        intercept,
        slope,
        max_residual: res.iter().fold(0.0_f64, |m, r| m.max(r.abs())),
        rms_residual: (res.iter().map(|r| r * r).sum::<f64>() / nf).sqrt(),
    })
}

/// Continuum estimate from samples at several spacings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub intercept: f64,
    pub slope: f64,
    /// Coefficient of `a^2`; zero for the affine fit.
    pub curvature: f64,
    pub max_residual: f64,
}

fn check_spacings(samples: &[(f64, f64)], min: usize) -> Result<()> {
    if samples.len() < min {
        return Err(Error::Fit(format!(
            "need at least {min} samples, got {}",
            samples.len()
        )));
    }
    let mut a: Vec<f64> = samples.iter().map(|s| s.0).collect();
    a.sort_by(f64::total_cmp);
    a.dedup();
    if a.len() < min {
        return Err(Error::Fit("spacings must be distinct".into()));
    }
    Ok(())
}

/// Affine least-squares extrapolation `v(a) = v0 + v1 a` to `a = 0`.
pub fn extrapolate_to_continuum(samples: &[(f64, f64)]) -> Result<Extrapolation> {
    check_spacings(samples, 3)?;
    let line = fit_line(samples)?;
    Ok(Extrapolation {
        intercept: line.intercept,
        slope: line.slope,
        curvature: 0.0,
        max_residual: line.max_residual,
    })
}

/// Quadratic least-squares extrapolation `v0 + v1 a + v2 a^2`.
pub fn extrapolate_quadratic(samples: &[(f64, f64)]) -> Result<Extrapolation> {
    check_spacings(samples, 4)?;
    let scale = samples.iter().fold(0.0_f64, |m, s| m.max(s.0.abs()));
    let mut ata = [[0.0_f64; 3]; 3];
    let mut atb = [0.0_f64; 3];
    for &(a, v) in samples {
        let t = a / scale;
        let row = [1.0, t, t * t];
        for i in 0..3 {
            atb[i] += row[i] * v;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let c = solve3(ata, atb).ok_or_else(|| Error::Fit("singular normal equations".into()))?;
    let max_residual = samples
        .iter()
        .map(|&(a, v)| {
            let t = a / scale;
            (v - c[0] - c[1] * t - c[2] * t * t).abs()
        })
        .fold(0.0, f64::max);
    Ok(Extrapolation {
        intercept: c[0],
        slope: c[1] / scale,
        curvature: c[2] / (scale * scale),
        max_residual,
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| m[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    Some(x)
}

/// Forces over a sequence of spacings with their continuum extrapolations.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumReport {
    pub samples: Vec<ForceReport>,
    pub global: Extrapolation,
    pub local: Extrapolation,
    pub left_global: Extrapolation,
    pub left_local: Extrapolation,
    pub right_global: Extrapolation,
    pub right_local: Extrapolation,
}

impl ContinuumReport {
    pub fn from_samples(samples: Vec<ForceReport>) -> Result<Self> {
        let fit = |g: fn(&ForceReport) -> f64| {
            let pts: Vec<(f64, f64)> = samples.iter().map(|r| (r.a, g(r))).collect();
            extrapolate_to_continuum(&pts)
        };
        Ok(Self {
            global: fit(|r| r.f_global)?,
            local: fit(|r| r.f_local)?,
            left_global: fit(|r| r.f_left_global)?,
            left_local: fit(|r| r.f_left_local)?,
            right_global: fit(|r| r.f_right_global)?,
            right_local: fit(|r| r.f_right_local)?,
            samples,
        })
    }
}

/// Evaluate `force_report` at every spacing and extrapolate.
pub fn continuum_sweep(
    pot: &PotentialSpec,
    geom: &Geometry,
    spacings: &[f64],
    scheme: &RenormScheme,
) -> Result<ContinuumReport> {
    let samples = spacings
        .iter()
        .map(|&a| force_report(pot, geom, a, scheme))
        .collect::<Result<Vec<_>>>()?;
    ContinuumReport::from_samples(samples)
}
