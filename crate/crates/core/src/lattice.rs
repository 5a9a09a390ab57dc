//! Uniform lattices on a Dirichlet interval, the background potentials and
//! the discretised Helmholtz operator.
//!
//! An interval `[x_left, x_right]` with spacing `a` has `N = (x_right - x_left)/a`
//! intervals and sites `n = 0..=N`. The field vanishes at `n = 0` and `n = N`,
//! so the operator acts on the `N - 1` interior sites.
//!
//! The lattice operator is tridiagonal with diagonal `2/a^2 + U(x_n)` and
//! off-diagonal `-1/a^2`.

use crate::error::{invalid, require_finite, Error, Result};
use crate::summation::NeumaierSum;

/// Relative tolerance on `(x_right - x_left)/a` being an integer.
pub const COMMENSURABILITY_TOL: f64 = 1e-9;

/// A uniform lattice on a closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeConfig {
    x_left: f64,
    x_right: f64,
    a: f64,
    sites: usize,
}

impl LatticeConfig {
    /// Build a lattice, requiring the interval to hold an integer number of
    /// spacings and at least two of them.
    pub fn new(x_left: f64, x_right: f64, a: f64) -> Result<Self> {
        require_finite("x_left", x_left)?;
        require_finite("x_right", x_right)?;
        require_finite("a", a)?;
        if a <= 0.0 {
            return Err(invalid("a", format!("spacing must be positive, got {a}")));
        }
        if x_right <= x_left {
            return Err(invalid(
                "x_right",
                format!("interval [{x_left}, {x_right}] is empty"),
            ));
        }
        let length = x_right - x_left;
        let ratio = length / a;
        let n = ratio.round();
        if (ratio - n).abs() > COMMENSURABILITY_TOL * ratio {
            return Err(Error::NonIntegralSites { length, a });
        }
        if n < 2.0 {
            return Err(Error::TooFewSites { sites: n as usize });
        }
        Ok(Self {
            x_left,
            x_right,
            a,
            sites: n as usize,
        })
    }

    /// Lattice starting at `x_left` with `sites` intervals of width `a`.
    pub fn from_sites(x_left: f64, a: f64, sites: usize) -> Result<Self> {
        if sites < 2 {
            return Err(Error::TooFewSites { sites });
        }
        Self::new(x_left, x_left + sites as f64 * a, a)
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Number of intervals `N`.
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Number of interior sites, `N - 1`.
    pub fn interior(&self) -> usize {
        self.sites - 1
    }

    /// Interval length `l`.
    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    /// Position of site `n`.
    pub fn x(&self, n: usize) -> f64 {
        self.x_left + n as f64 * self.a
    }

    /// Trapezoidal lattice integral over all `N + 1` sites.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.sites + 1 {
            return Err(Error::LengthMismatch {
                expected: self.sites + 1,
                got: values.len(),
            });
        }
        lattice_integral(values, self.a)
    }
}

/// Background potential `U(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialSpec {
    /// `U = 0`.
    Zero,
    /// `U = m^2`.
    UniformMass { m: f64 },
    /// `U = m^2 + (alpha^2 - 1/4)/(x - x0)^2`, with `alpha >= 1/2`.
    Bessel { m: f64, alpha: f64, x0: f64 },
}

impl PotentialSpec {
    pub fn uniform_mass(m: f64) -> Result<Self> {
        check_mass(m)?;
        Ok(Self::UniformMass { m })
    }

    pub fn bessel(m: f64, alpha: f64, x0: f64) -> Result<Self> {
        check_mass(m)?;
        require_finite("alpha", alpha)?;
        require_finite("x0", x0)?;
        if alpha < 0.5 {
            return Err(invalid("alpha", format!("must be >= 1/2, got {alpha}")));
        }
        Ok(Self::Bessel { m, alpha, x0 })
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::UniformMass { m } | Self::Bessel { m, .. } => m,
        }
    }

    /// Coefficient `alpha^2 - 1/4` of the inverse-square term.
    pub fn strength(&self) -> f64 {
        match *self {
            Self::Bessel { alpha, .. } => alpha * alpha - 0.25,
            _ => 0.0,
        }
    }

    /// True when `U` is the same constant everywhere.
    pub fn is_uniform(&self) -> bool {
        self.strength() == 0.0
    }

    /// Evaluate `U(x)`.
    pub fn at(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Zero => Ok(0.0),
            Self::UniformMass { m } => Ok(m * m),
            Self::Bessel { m, alpha, x0 } => {
                let d = x - x0;
                let b = alpha * alpha - 0.25;
                if d == 0.0 && b != 0.0 {
                    return Err(Error::PotentialPole { x });
                }
                let u = if b == 0.0 { m * m } else { m * m + b / (d * d) };
                if u.is_finite() {
                    Ok(u)
                } else {
                    Err(Error::PotentialPole { x })
                }
            }
        }
    }

    /// Reject intervals that touch or contain the inverse-square core.
    pub fn check_interval(&self, x_left: f64) -> Result<()> {
        if let Self::Bessel { x0, .. } = *self {
            if self.strength() != 0.0 && x0 >= x_left {
                return Err(Error::CoreInsideInterval { x0, x_left });
            }
        }
        Ok(())
    }

    /// `U` at every site `0..=N` of `cfg`.
    pub fn sample(&self, cfg: &LatticeConfig) -> Result<Vec<f64>> {
        self.check_interval(cfg.x_left())?;
        (0..=cfg.sites()).map(|n| self.at(cfg.x(n))).collect()
    }
}

fn check_mass(m: f64) -> Result<()> {
    require_finite("m", m)?;
    if m < 0.0 {
        return Err(invalid("m", format!("mass must be non-negative, got {m}")));
    }
    Ok(())
}

/// Evaluate `U(x)` for `pot`.
pub fn potential_at(pot: &PotentialSpec, x: f64) -> Result<f64> {
    pot.at(x)
}

/// Symmetric tridiagonal operator on the interior sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    cfg: LatticeConfig,
    diag: Vec<f64>,
    offdiag: f64,
    potential: Vec<f64>,
}

impl DiscreteOperator {
    pub fn config(&self) -> &LatticeConfig {
        &self.cfg
    }

    /// Diagonal entries, index `n - 1` for site `n`.
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Common off-diagonal entry `-1/a^2`.
    pub fn offdiag(&self) -> f64 {
        self.offdiag
    }

    /// Potential values on the interior sites, index `n - 1` for site `n`.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }
}

/// Discretise `-d^2/dx^2 + U` on the interior sites of `cfg`.
pub fn build_operator(cfg: &LatticeConfig, pot: &PotentialSpec) -> Result<DiscreteOperator> {
    pot.check_interval(cfg.x_left())?;
    let u = (1..cfg.sites())
        .map(|n| pot.at(cfg.x(n)))
        .collect::<Result<Vec<_>>>()?;
    build_operator_from_values(cfg, &u)
}

/// Discretise `-d^2/dx^2 + U` with `U` given on the `N - 1` interior sites.
pub fn build_operator_from_values(cfg: &LatticeConfig, u: &[f64]) -> Result<DiscreteOperator> {
    if u.len() != cfg.interior() {
        return Err(Error::LengthMismatch {
            expected: cfg.interior(),
            got: u.len(),
        });
    }
    let a = cfg.a();
    let kinetic = 2.0 / (a * a);
    let mut diag = Vec::with_capacity(u.len());
    for (i, &v) in u.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::PotentialPole { x: cfg.x(i + 1) });
        }
        diag.push(kinetic + v);
    }
    Ok(DiscreteOperator {
        cfg: *cfg,
        diag,
        offdiag: -1.0 / (a * a),
        potential: u.to_vec(),
    })
}

/// Trapezoidal lattice integral `(a/2)(sum_{n=1}^{N} + sum_{n=0}^{N-1}) v_n`.
pub fn lattice_integral(values: &[f64], a: f64) -> Result<f64> {
    if values.len() < 3 {
        return Err(Error::TooFewSites {
            sites: values.len().saturating_sub(1),
        });
    }
    let n = values.len() - 1;
    let mut upper = NeumaierSum::new();
    let mut lower = NeumaierSum::new();
    for &v in &values[1..=n] {
        upper.add(v);
    }
    for &v in &values[..n] {
        lower.add(v);
    }
    Ok(0.5 * a * (upper.value() + lower.value()))
}

fn check_site(phi: &[f64], n: usize) -> Result<usize> {
    if phi.len() < 3 {
        return Err(Error::TooFewSites {
            sites: phi.len().saturating_sub(1),
        });
    }
    let last = phi.len() - 1;
    if n > last {
        return Err(Error::SiteOutOfRange { n, max: last });
    }
    Ok(last)
}

/// Symmetric discretisation of `(d phi/dx)^2` at site `n`, with `phi` given on
/// sites `0..=N`. At the Dirichlet ends it reduces to the squared one-sided
/// gradient of the neighbouring site.
pub fn symmetric_square_gradient(phi: &[f64], n: usize, a: f64) -> Result<f64> {
    let last = check_site(phi, n)?;
    let g = if n == 0 {
        phi[1] * phi[1] / (a * a)
    } else if n == last {
        phi[last - 1] * phi[last - 1] / (a * a)
    } else {
        let fwd = (phi[n + 1] - phi[n]) / a;
        let bwd = (phi[n] - phi[n - 1]) / a;
        0.5 * (fwd * fwd + bwd * bwd)
    };
    Ok(g)
}

/// Discretised total derivative `(phi^2)''/2` at site `n`, reflecting `phi^2`
/// across the Dirichlet ends.
pub fn divergence_term(phi: &[f64], n: usize, a: f64) -> Result<f64> {
    let last = check_site(phi, n)?;
    let sq = |j: isize| -> f64 {
        let j = if j < 0 {
            1
        } else if j as usize > last {
            last - 1
        } else {
            j as usize
        };
        phi[j] * phi[j]
    };
    let n = n as isize;
    Ok((sq(n + 1) - 2.0 * sq(n) + sq(n - 1)) / (2.0 * a * a))
}
