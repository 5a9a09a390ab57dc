//! First-order perturbation theory in the background potential.
//!
//! The unperturbed system is the massless lattice with modes
//! `w^k_n = sqrt(2/N) sin(pi k n/N)` and frequencies
//! `omega_k = (2/a) sin(pi k/2N)`. Switching on `lambda U` shifts
//! `epsilon_k^2` by `lambda (w^k U w^k)` and the modes by
//! `lambda sum_{p != k} (w^p U w^k)/(omega_k^2 - omega_p^2) w^p`, from which
//! the first-order energy and `T_11` follow. The results are checked against
//! finite differences of exact lattice solves.

use crate::artefacts::h_closed;
use crate::error::{Error, Result};
use crate::lattice::{build_operator_from_values, LatticeConfig};
use crate::observables::{energy_from_eigenvalues, t11_raw_at_site};
use crate::renorm::compute_c;
use crate::spectral::{analytic_eigenvalues, solve_eigenvalues, solve_modes};
use crate::summation::NeumaierSum;
use std::f64::consts::PI;

fn check_potential(cfg: &LatticeConfig, u: &[f64]) -> Result<()> {
    if u.len() != cfg.interior() {
        return Err(Error::LengthMismatch {
            expected: cfg.interior(),
            got: u.len(),
        });
    }
    if let Some(i) = u.iter().position(|x| !x.is_finite()) {
        return Err(Error::PotentialPole { x: cfg.x(i + 1) });
    }
    Ok(())
}

fn check_interior_site(cfg: &LatticeConfig, n: usize) -> Result<()> {
    if n == 0 || n >= cfg.sites() {
        return Err(Error::SiteOutOfRange {
            n,
            max: cfg.sites() - 1,
        });
    }
    Ok(())
}

/// Unperturbed modes and frequencies with the potential's matrix elements.
struct Basis {
    big_n: usize,
    a: f64,
    omega: Vec<f64>,
    // w[k * (N + 1) + n] for k = 0..N-1 (mode k + 1), n = 0..=N
    w: Vec<f64>,
    // (w^p U w^k), mode-major
    elems: Vec<f64>,
}

impl Basis {
    fn new(cfg: &LatticeConfig, u: &[f64]) -> Self {
        let big_n = cfg.sites();
        let d = big_n - 1;
        let stride = big_n + 1;
        let norm = (2.0 / big_n as f64).sqrt();
        let mut w = vec![0.0; d * stride];
        for k in 1..big_n {
            for n in 1..big_n {
                let j = (k * n) % (2 * big_n);
                w[(k - 1) * stride + n] = norm * (PI * j as f64 / big_n as f64).sin();
            }
        }
        let mut elems = vec![0.0; d * d];
        let mut wu = vec![0.0; stride];
        for p in 0..d {
            let wp = &w[p * stride..(p + 1) * stride];
            for n in 1..big_n {
                wu[n] = wp[n] * u[n - 1];
            }
            for k in p..d {
                let wk = &w[k * stride..(k + 1) * stride];
                let s: f64 = (1..big_n).map(|n| wu[n] * wk[n]).sum();
                elems[p * d + k] = s;
                elems[k * d + p] = s;
            }
        }
        let omega = analytic_eigenvalues(cfg, 0.0).iter().map(|x| x.sqrt()).collect();
        Self {
            big_n,
            a: cfg.a(),
            omega,
            w,
            elems,
        }
    }

    fn modes(&self) -> usize {
        self.big_n - 1
    }

    fn w(&self, k: usize, n: usize) -> f64 {
        self.w[k * (self.big_n + 1) + n]
    }

    fn elem(&self, p: usize, k: usize) -> f64 {
        self.elems[p * self.modes() + k]
    }

    /// First-order correction to mode `k` at site `n` (zero at the ends).
    fn v1(&self, k: usize, n: usize) -> f64 {
        if n == 0 || n >= self.big_n {
            return 0.0;
        }
        let ok2 = self.omega[k] * self.omega[k];
        let mut s = 0.0;
        for p in 0..self.modes() {
            if p != k {
                let op2 = self.omega[p] * self.omega[p];
                s += self.elem(p, k) / (ok2 - op2) * self.w(p, n);
            }
        }
        s
    }

    /// Direct first-order `T_11` at an interior site, with `u_site` the
    /// potential at that site.
    fn t11_first(&self, n: usize, u_site: f64) -> f64 {
        let a = self.a;
        let a3 = a * a * a;
        let mut s = NeumaierSum::new();
        for k in (0..self.modes()).rev() {
            let om = self.omega[k];
            let e2 = self.elem(k, k);
            let e1 = e2 / (2.0 * om);
            let (wm, w0, wp) = (self.w(k, n - 1), self.w(k, n), self.w(k, n + 1));
            let (vm, v0, vp) = (self.v1(k, n - 1), self.v1(k, n), self.v1(k, n + 1));
            let first = w0 * w0 / (2.0 * a) * ((e2 - u_site) / om - e1) + om * w0 * v0 / a;
            let stencil_w = wp * wp - 2.0 * w0 * w0 + wm * wm;
            let stencil_wv = wp * vp - 2.0 * w0 * v0 + wm * vm;
            let second = -stencil_w * e1 / (8.0 * a3 * om * om) + stencil_wv / (4.0 * a3 * om);
            s.add(first + second);
        }
        s.value()
    }
}

fn inverse_sine_sum(big_n: usize) -> f64 {
    let nf = big_n as f64;
    (1..big_n)
        .rev()
        .map(|k| 1.0 / (nf * (PI * k as f64 / (2.0 * nf)).sin()))
        .collect::<NeumaierSum>()
        .value()
}

/// `E^(1) = (l/8) sum_k [1/(N sin(pi k/2N))] (2/N) sum_n sin^2(pi k n/N) U_n`.
pub fn first_order_energy(cfg: &LatticeConfig, u: &[f64]) -> Result<f64> {
    check_potential(cfg, u)?;
    let big_n = cfg.sites();
    let nf = big_n as f64;
    let mut total = NeumaierSum::new();
    for k in (1..big_n).rev() {
        let mut proj = NeumaierSum::new();
        for n in 1..big_n {
            let s = (PI * ((k * n) % (2 * big_n)) as f64 / nf).sin();
            proj.add(2.0 / nf * s * s * u[n - 1]);
        }
        total.add(proj.value() / (nf * (PI * k as f64 / (2.0 * nf)).sin()));
    }
    Ok(cfg.length() / 8.0 * total.value())
}

/// Split of `E^(1)` into the logarithmically divergent mean-potential part
/// and the finite fluctuation part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDecomposition {
    /// `(1/8) l U_bar ((2/pi) ln N + c(N))`.
    pub divergent: f64,
    /// `(l/8) sum_k d_k/(N sin(pi k/2N))`.
    pub finite: f64,
}

impl EnergyDecomposition {
    pub fn total(&self) -> f64 {
        self.divergent + self.finite
    }
}

/// Evaluate `E^(1)` as mean plus fluctuation, with `U_bar` the mean of `U`
/// over the interior sites.
pub fn first_order_energy_decomposed(cfg: &LatticeConfig, u: &[f64]) -> Result<EnergyDecomposition> {
    check_potential(cfg, u)?;
    let big_n = cfg.sites();
    let nf = big_n as f64;
    let l = cfg.length();
    let u_bar = u.iter().copied().collect::<NeumaierSum>().value() / u.len() as f64;
    let divergent = l * u_bar / 8.0 * (2.0 / PI * nf.ln() + compute_c(big_n));
    let hat: Vec<f64> = u.iter().map(|x| x - u_bar).collect();
    let mut finite = NeumaierSum::new();
    for k in (1..big_n).rev() {
        let mut d = NeumaierSum::new();
        for n in 1..big_n {
            let s = (PI * ((k * n) % (2 * big_n)) as f64 / nf).sin();
            d.add(2.0 / nf * s * s * hat[n - 1]);
        }
        finite.add(d.value() / (nf * (PI * k as f64 / (2.0 * nf)).sin()));
    }
    Ok(EnergyDecomposition {
        divergent,
        finite: l / 8.0 * finite.value(),
    })
}

/// First-order correction to mode `k` (`1..N-1`) on the interior sites.
pub fn first_order_eigenvector(cfg: &LatticeConfig, u: &[f64], k: usize) -> Result<Vec<f64>> {
    check_potential(cfg, u)?;
    if k == 0 || k >= cfg.sites() {
        return Err(Error::SiteOutOfRange {
            n: k,
            max: cfg.sites() - 1,
        });
    }
    let b = Basis::new(cfg, u);
    Ok((1..cfg.sites()).map(|n| b.v1(k - 1, n)).collect())
}

/// First-order `T_11` at interior site `n` from the unshifted potential.
pub fn first_order_t11_direct(cfg: &LatticeConfig, u: &[f64], n: usize) -> Result<f64> {
    check_potential(cfg, u)?;
    check_interior_site(cfg, n)?;
    Ok(Basis::new(cfg, u).t11_first(n, u[n - 1]))
}

/// First-order `T_11` at interior site `n`, via the potential shifted to
/// vanish at `n`. The shift isolates the divergent part in closed form:
/// `T^(1) = T~^(1) - (U_n/8) sum_k 1/(N sin(pi k/2N)) + (U_n/8) h(N, n)`.
pub fn first_order_t11(cfg: &LatticeConfig, u: &[f64], n: usize) -> Result<f64> {
    check_potential(cfg, u)?;
    check_interior_site(cfg, n)?;
    let un = u[n - 1];
    let shifted: Vec<f64> = u.iter().map(|x| x - un).collect();
    let tilde = Basis::new(cfg, &shifted).t11_first(n, 0.0);
    let big_n = cfg.sites();
    Ok(tilde - un / 8.0 * inverse_sine_sum(big_n) + un / 8.0 * h_closed(big_n, n as i64))
}

/// Second-order energy coefficient `-sum_k m^4/(16 omega_k^3)` for `U = m^2`.
pub fn second_order_energy_uniform(cfg: &LatticeConfig, m: f64) -> f64 {
    let m4 = m.powi(4);
    analytic_eigenvalues(cfg, 0.0)
        .iter()
        .rev()
        .map(|w2| -m4 / (16.0 * w2 * w2.sqrt()))
        .collect::<NeumaierSum>()
        .value()
}

/// First-order predictions against finite differences of exact solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearResponse {
    pub energy_first_order: f64,
    pub energy_fd: f64,
    pub t11_first_order: f64,
    pub t11_fd: f64,
    pub site: usize,
    pub step: f64,
}

impl LinearResponse {
    pub fn energy_rel_error(&self) -> f64 {
        (self.energy_first_order - self.energy_fd).abs() / self.energy_fd.abs().max(f64::MIN_POSITIVE)
    }

    pub fn t11_rel_error(&self) -> f64 {
        (self.t11_first_order - self.t11_fd).abs() / self.t11_fd.abs().max(f64::MIN_POSITIVE)
    }
}

/// Central differences in `lambda` with one Richardson refinement.
fn richardson(f: impl Fn(f64) -> Result<f64>, h: f64) -> Result<f64> {
    let d = |h: f64| -> Result<f64> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    let fine = d(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Compare `E^(1)` and `T_11^(1)` at site `n` with derivatives of the exact
/// lattice results for `lambda U`.
pub fn verify_linear_response(cfg: &LatticeConfig, u: &[f64], n: usize) -> Result<LinearResponse> {
    check_potential(cfg, u)?;
    check_interior_site(cfg, n)?;
    let scale = u.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::Scheme("potential vanishes identically".into()));
    }
    let step = 1e-3 / scale;
    let scaled = |lambda: f64| -> Vec<f64> { u.iter().map(|x| lambda * x).collect() };
    let energy_fd = richardson(
        |lambda| {
            let op = build_operator_from_values(cfg, &scaled(lambda))?;
            energy_from_eigenvalues(&solve_eigenvalues(&op)?)
        },
        step,
    )?;
    let t11_fd = richardson(
        |lambda| {
            let lu = scaled(lambda);
            let sd = solve_modes(&build_operator_from_values(cfg, &lu)?)?;
            t11_raw_at_site(&sd, &lu, n)
        },
        step,
    )?;
    Ok(LinearResponse {
        energy_first_order: first_order_energy(cfg, u)?,
        energy_fd,
        t11_first_order: first_order_t11(cfg, u, n)?,
        t11_fd,
        site: n,
        step,
    })
}

/// Least-squares fit of `c lambda^2` to `E(lambda) - E(0) - lambda E^(1)`
/// from exact solves.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderFit {
    pub coefficient: f64,
    /// Largest misfit relative to the largest remainder.
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
}

pub fn second_order_coefficient(cfg: &LatticeConfig, u: &[f64], lambdas: &[f64]) -> Result<SecondOrderFit> {
    check_potential(cfg, u)?;
    if lambdas.iter().all(|&x| x == 0.0) {
        return Err(Error::Fit("need a nonzero lambda".into()));
    }
    let energy = |lambda: f64| -> Result<f64> {
        let lu: Vec<f64> = u.iter().map(|x| lambda * x).collect();
        energy_from_eigenvalues(&solve_eigenvalues(&build_operator_from_values(cfg, &lu)?)?)
    };
    let e0 = energy(0.0)?;
    let e1 = first_order_energy(cfg, u)?;
    let samples = lambdas
        .iter()
        .map(|&lam| Ok((lam, energy(lam)? - e0 - lam * e1)))
        .collect::<Result<Vec<_>>>()?;
    let num: f64 = samples.iter().map(|(l, r)| r * l * l).sum();
    let den: f64 = samples.iter().map(|(l, _)| l.powi(4)).sum();
    let coefficient = num / den;
    let scale = samples.iter().fold(0.0_f64, |m, s| m.max(s.1.abs()));
    let misfit = samples
        .iter()
        .map(|(l, r)| (r - coefficient * l * l).abs())
        .fold(0.0, f64::max);
    Ok(SecondOrderFit {
        coefficient,
        residual: misfit / scale.max(f64::MIN_POSITIVE),
        samples,
    })
}
