//! Raw lattice observables built from the mode sums.
//!
//! With `epsilon_k = sqrt(omega_k^2)` and unit-norm modes `v^k`, the raw
//! vacuum energy is `E_reg = (1/2) sum_k epsilon_k`, and the stress tensor
//! components at site `n` are
//!
//! ```text
//! T11_n = sum_k [ (epsilon_k^2 - U_n) (v^k_n)^2 / (2 a epsilon_k) + S_n(v^k) / (8 a^3 epsilon_k) ]
//! T00_n = sum_k [ epsilon_k (v^k_n)^2 / (2 a)                     + S_n(v^k) / (8 a^3 epsilon_k) ]
//! ```
//!
//! where `S_n(v) = v_{n+1}^2 - 2 v_n^2 + v_{n-1}^2`, with `v^2` reflected
//! across the Dirichlet ends. Mode sums run from the highest mode down.

use crate::error::{Error, Result};
use crate::lattice::{LatticeConfig, PotentialSpec};
use crate::renorm::RenormScheme;
use crate::spectral::{EdgeModes, SpectralData};
use crate::summation::NeumaierSum;

/// Sums longer than this use compensated accumulation.
pub const COMPENSATE_ABOVE: usize = 1000;

/// Stress tensor on all sites `0..=N` of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct StressProfile {
    pub cfg: LatticeConfig,
    pub t00: Vec<f64>,
    pub t11: Vec<f64>,
    /// `None` for raw profiles; the scheme applied otherwise.
    pub scheme: Option<RenormScheme>,
}

impl StressProfile {
    pub fn is_renormalized(&self) -> bool {
        self.scheme.is_some()
    }

    /// Site positions.
    pub fn positions(&self) -> Vec<f64> {
        (0..=self.cfg.sites()).map(|n| self.cfg.x(n)).collect()
    }
}

/// Which end of an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn frequencies(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &w2)| {
            if w2 <= 0.0 || !w2.is_finite() {
                Err(Error::NegativeEigenvalue { index: k, value: w2 })
            } else {
                Ok(w2.sqrt())
            }
        })
        .collect()
}

fn mode_sum(terms: impl DoubleEndedIterator<Item = f64>, compensate: bool) -> f64 {
    if compensate {
        terms.rev().collect::<NeumaierSum>().value()
    } else {
        terms.rev().sum()
    }
}

/// `E_reg = (1/2) sum_k epsilon_k` from the eigenvalues.
pub fn energy_from_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let eps = frequencies(eigenvalues)?;
    Ok(0.5 * mode_sum(eps.into_iter(), eigenvalues.len() > COMPENSATE_ABOVE))
}

/// Unrenormalized lattice vacuum energy.
pub fn vacuum_energy_raw(sd: &SpectralData) -> Result<f64> {
    energy_from_eigenvalues(sd.eigenvalues())
}

struct Accum {
    plain: Vec<f64>,
    comp: Vec<NeumaierSum>,
    compensate: bool,
}

impl Accum {
    fn new(len: usize, compensate: bool) -> Self {
        if compensate {
            Self {
                plain: Vec::new(),
                comp: vec![NeumaierSum::new(); len],
                compensate,
            }
        } else {
            Self {
                plain: vec![0.0; len],
                comp: Vec::new(),
                compensate,
            }
        }
    }

    #[inline]
    fn add(&mut self, i: usize, x: f64) {
        if self.compensate {
            self.comp[i].add(x);
        } else {
            self.plain[i] += x;
        }
    }

    fn finish(self) -> Vec<f64> {
        if self.compensate {
            self.comp.iter().map(NeumaierSum::value).collect()
        } else {
            self.plain
        }
    }
}

/// Raw `T_00` and `T_11` on sites `0..=N`, with `U` supplied on the interior
/// sites.
pub fn stress_raw_with_values(sd: &SpectralData, u_interior: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let cfg = sd.config();
    let big_n = cfg.sites();
    if u_interior.len() != big_n - 1 {
        return Err(Error::LengthMismatch {
            expected: big_n - 1,
            got: u_interior.len(),
        });
    }
    let a = cfg.a();
    let eps = frequencies(sd.eigenvalues())?;
    let compensate = sd.modes() > COMPENSATE_ABOVE;
    let mut t00 = Accum::new(big_n + 1, compensate);
    let mut t11 = Accum::new(big_n + 1, compensate);
    let mut u = vec![0.0; big_n + 1];
    u[1..big_n].copy_from_slice(u_interior);
    // w[j] holds v^2 at site j - 1, covering sites -1..=N+1
    let mut w = vec![0.0; big_n + 3];
    let c2 = 1.0 / (2.0 * a);
    let c8 = 1.0 / (8.0 * a * a * a);
    for k in (0..sd.modes()).rev() {
        let v = sd.eigenvector(k);
        for (j, x) in v.iter().enumerate() {
            w[j + 2] = x * x;
        }
        w[0] = w[2];
        w[big_n + 2] = w[big_n];
        let e = eps[k];
        let e2 = sd.eigenvalues()[k];
        for n in 0..=big_n {
            let vn2 = w[n + 1];
            let stencil = (w[n + 2] - 2.0 * vn2 + w[n]) * c8 / e;
            t00.add(n, e * vn2 * c2 + stencil);
            t11.add(n, (e2 - u[n]) * vn2 * c2 / e + stencil);
        }
    }
    Ok((t00.finish(), t11.finish()))
}

fn interior_potential(cfg: &LatticeConfig, pot: &PotentialSpec) -> Result<Vec<f64>> {
    pot.check_interval(cfg.x_left())?;
    (1..cfg.sites()).map(|n| pot.at(cfg.x(n))).collect()
}

/// Raw `T_11` on sites `0..=N`.
pub fn t11_raw(sd: &SpectralData, pot: &PotentialSpec) -> Result<Vec<f64>> {
    let u = interior_potential(sd.config(), pot)?;
    Ok(stress_raw_with_values(sd, &u)?.1)
}

/// Raw `T_00` on sites `0..=N`.
pub fn t00_raw(sd: &SpectralData) -> Result<Vec<f64>> {
    let zeros = vec![0.0; sd.config().interior()];
    Ok(stress_raw_with_values(sd, &zeros)?.0)
}

/// Raw stress profile for `pot`.
pub fn stress_profile_raw(sd: &SpectralData, pot: &PotentialSpec) -> Result<StressProfile> {
    let u = interior_potential(sd.config(), pot)?;
    let (t00, t11) = stress_raw_with_values(sd, &u)?;
    Ok(StressProfile {
        cfg: *sd.config(),
        t00,
        t11,
        scheme: None,
    })
}

/// Raw `T_11` at one interior site `n`, with `U` on the interior sites.
pub fn t11_raw_at_site(sd: &SpectralData, u_interior: &[f64], n: usize) -> Result<f64> {
    let cfg = sd.config();
    let big_n = cfg.sites();
    if u_interior.len() != big_n - 1 {
        return Err(Error::LengthMismatch {
            expected: big_n - 1,
            got: u_interior.len(),
        });
    }
    if n > big_n {
        return Err(Error::SiteOutOfRange { n, max: big_n });
    }
    let a = cfg.a();
    let eps = frequencies(sd.eigenvalues())?;
    let un = if n == 0 || n == big_n { 0.0 } else { u_interior[n - 1] };
    let sq = |k: usize, j: isize| -> f64 {
        let j = if j < 0 {
            1
        } else if j as usize > big_n {
            big_n - 1
        } else {
            j as usize
        };
        let x = sd.component(k, j);
        x * x
    };
    let ni = n as isize;
    let terms = (0..sd.modes()).map(|k| {
        let e = eps[k];
        let vn2 = sq(k, ni);
        let stencil = sq(k, ni + 1) - 2.0 * vn2 + sq(k, ni - 1);
        (sd.eigenvalues()[k] - un) * vn2 / (2.0 * a * e) + stencil / (8.0 * a * a * a * e)
    });
    Ok(mode_sum(terms, sd.modes() > COMPENSATE_ABOVE))
}

/// Raw `(T_00, T_11)` at site `n` for a constant potential `U = m^2`, from
/// the closed-form modes. Costs `O(N)` instead of a full solve.
pub fn stress_uniform_at_site(cfg: &LatticeConfig, m: f64, n: usize) -> Result<(f64, f64)> {
    let big_n = cfg.sites();
    if n > big_n {
        return Err(Error::SiteOutOfRange { n, max: big_n });
    }
    let a = cfg.a();
    let nf = big_n as f64;
    let m2 = m * m;
    let un = if n == 0 || n == big_n { 0.0 } else { m2 };
    let sq = |k: usize, j: isize| -> f64 {
        let phase = (k as i64 * j as i64).rem_euclid(2 * big_n as i64);
        let s = (std::f64::consts::PI * phase as f64 / nf).sin();
        2.0 / nf * s * s
    };
    let ni = n as isize;
    let compensate = big_n - 1 > COMPENSATE_ABOVE;
    let mut t00 = Accum::new(1, compensate);
    let mut t11 = Accum::new(1, compensate);
    for k in (1..big_n).rev() {
        let e2 = crate::spectral::analytic_eigenvalue(cfg, m, k);
        let e = e2.sqrt();
        let vn2 = sq(k, ni);
        let stencil = (sq(k, ni + 1) - 2.0 * vn2 + sq(k, ni - 1)) / (8.0 * a * a * a * e);
        t00.add(0, e * vn2 / (2.0 * a) + stencil);
        t11.add(0, (e2 - un) * vn2 / (2.0 * a * e) + stencil);
    }
    Ok((t00.finish()[0], t11.finish()[0]))
}

/// Raw boundary value `T_11 = T_00 = sum_k v_edge^2 / (4 a^3 epsilon_k)` at
/// one end of the interval.
pub fn t11_raw_boundary(edge: &EdgeModes, side: Side) -> Result<f64> {
    let a = edge.config().a();
    let eps = frequencies(edge.eigenvalues())?;
    let comps = match side {
        Side::Left => edge.first(),
        Side::Right => edge.last(),
    };
    let terms = comps.iter().zip(&eps).map(|(v, e)| v * v / e);
    let s = mode_sum(terms, eps.len() > COMPENSATE_ABOVE);
    Ok(s / (4.0 * a * a * a))
}

/// Residual `lattice_integral(T_00) - E`. Only defined for raw profiles.
pub fn sum_rule_residual(profile: &StressProfile, energy: f64) -> Result<f64> {
    if profile.is_renormalized() {
        return Err(Error::Scheme(
            "the energy sum rule applies to raw profiles only".into(),
        ));
    }
    Ok(profile.cfg.integrate(&profile.t00)? - energy)
}
