//! Eigenpairs of the lattice operator.
//!
//! The operator is symmetric tridiagonal, so its spectrum is computed with
//! implicit QL iterations and Wilkinson-type shifts. Eigenvector accumulation
//! can be restricted to a subset of rows: the boundary observables only need
//! the first and last interior components of each mode, which turns an
//! `O(N^3)` solve into `O(N^2)`.
//!
//! Eigenvalues are returned in ascending order. Eigenvectors are normalised to
//! `sum_n v_n^2 = 1` over the interior sites, and the sign is fixed by making
//! the first non-negligible component positive.

use crate::error::{Error, Result};
use crate::lattice::{DiscreteOperator, LatticeConfig};
use std::f64::consts::PI;

const MAX_SWEEPS: usize = 60;

/// Full set of eigenpairs on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    cfg: LatticeConfig,
    eigenvalues: Vec<f64>,
    // mode-major: vectors[k * dim + (n - 1)] = v^k_n
    vectors: Vec<f64>,
}

impl SpectralData {
    /// Assemble from raw parts. `vectors` is mode-major with `N - 1` entries
    /// per mode.
    pub fn from_parts(cfg: LatticeConfig, eigenvalues: Vec<f64>, vectors: Vec<f64>) -> Result<Self> {
        let dim = cfg.interior();
        if eigenvalues.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: eigenvalues.len(),
            });
        }
        if vectors.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: vectors.len(),
            });
        }
        Ok(Self {
            cfg,
            eigenvalues,
            vectors,
        })
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.cfg
    }

    /// Number of modes, `N - 1`.
    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues `omega_k^2` in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Interior components `v^k_1 .. v^k_{N-1}` of mode `k` (0-based).
    pub fn eigenvector(&self, k: usize) -> &[f64] {
        let d = self.modes();
        &self.vectors[k * d..(k + 1) * d]
    }

    /// Component of mode `k` at lattice site `n` in `0..=N`; zero at the ends.
    pub fn component(&self, k: usize, n: usize) -> f64 {
        if n == 0 || n >= self.cfg.sites() {
            0.0
        } else {
            self.eigenvector(k)[n - 1]
        }
    }

    /// Mutable access to mode `k`, for building perturbed data in tests and
    /// diagnostics.
    pub fn eigenvector_mut(&mut self, k: usize) -> &mut [f64] {
        let d = self.modes();
        &mut self.vectors[k * d..(k + 1) * d]
    }
}

/// Eigenvalues together with the first and last interior component of every
/// mode.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeModes {
    cfg: LatticeConfig,
    eigenvalues: Vec<f64>,
    first: Vec<f64>,
    last: Vec<f64>,
}

impl EdgeModes {
    pub fn config(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `v^k_1` for every mode.
    pub fn first(&self) -> &[f64] {
        &self.first
    }

    /// `v^k_{N-1}` for every mode.
    pub fn last(&self) -> &[f64] {
        &self.last
    }
}

impl From<&SpectralData> for EdgeModes {
    fn from(sd: &SpectralData) -> Self {
        let d = sd.modes();
        Self {
            cfg: sd.cfg,
            eigenvalues: sd.eigenvalues.clone(),
            first: (0..d).map(|k| sd.eigenvector(k)[0]).collect(),
            last: (0..d).map(|k| sd.eigenvector(k)[d - 1]).collect(),
        }
    }
}

/// All eigenpairs of `op`.
pub fn solve_modes(op: &DiscreteOperator) -> Result<SpectralData> {
    let dim = op.dim();
    let rows: Vec<usize> = (0..dim).collect();
    let (eigenvalues, vectors) = solve(op, Some(&rows))?;
    let mut vectors = vectors.unwrap_or_default();
    for k in 0..dim {
        fix_sign(&mut vectors[k * dim..(k + 1) * dim]);
    }
    Ok(SpectralData {
        cfg: *op.config(),
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues of `op` only.
pub fn solve_eigenvalues(op: &DiscreteOperator) -> Result<Vec<f64>> {
    Ok(solve(op, None)?.0)
}

/// Eigenvalues of `op` and the boundary-adjacent components of each mode.
pub fn solve_edge_modes(op: &DiscreteOperator) -> Result<EdgeModes> {
    let dim = op.dim();
    let rows = if dim == 1 { vec![0] } else { vec![0, dim - 1] };
    let (eigenvalues, vectors) = solve(op, Some(&rows))?;
    let vectors = vectors.unwrap_or_default();
    let r = rows.len();
    let mut first = Vec::with_capacity(dim);
    let mut last = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut v1 = vectors[k * r];
        let mut vn = vectors[k * r + r - 1];
        if v1 < 0.0 {
            v1 = -v1;
            vn = -vn;
        }
        first.push(v1);
        last.push(vn);
    }
    Ok(EdgeModes {
        cfg: *op.config(),
        eigenvalues,
        first,
        last,
    })
}

fn fix_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(&lead) = v.iter().find(|x| x.abs() > 1e-10 * scale) {
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Implicit QL on the tridiagonal operator. When `rows` is given, returns the
/// listed rows of the eigenvector matrix as a mode-major block of
/// `rows.len()` entries per mode.
fn solve(op: &DiscreteOperator, rows: Option<&[usize]>) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = op.dim();
    let mut d = op.diag().to_vec();
    let mut e = vec![op.offdiag(); n];
    e[n - 1] = 0.0;

    let r = rows.map_or(0, <[usize]>::len);
    let mut z = rows.map(|rows| {
        let mut z = vec![0.0; n * r];
        for (j, &row) in rows.iter().enumerate() {
            z[row * r + j] = 1.0;
        }
        z
    });

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: MAX_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut rr = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + rr.copysign(g));
            let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                rr = f.hypot(g);
                e[i + 1] = rr;
                if rr == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / rr;
                c = g / rr;
                g = d[i + 1] - p;
                rr = (d[i] - g) * s + 2.0 * c * b;
                p = s * rr;
                d[i + 1] = g + p;
                g = c * rr - b;
                if let Some(z) = z.as_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * r);
                    let zi = &mut lo[i * r..];
                    let zj = &mut hi[..r];
                    for (a, b) in zi.iter_mut().zip(zj.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = z.map(|z| {
        let mut out = Vec::with_capacity(n * r);
        for &i in &order {
            out.extend_from_slice(&z[i * r..(i + 1) * r]);
        }
        out
    });
    Ok((values, vectors))
}

/// Eigenvalue `rho_k^2 + m^2` of the uniform-mass operator, `k = 1..N-1`.
pub fn analytic_eigenvalue(cfg: &LatticeConfig, m: f64, k: usize) -> f64 {
    let n = cfg.sites() as f64;
    let a = cfg.a();
    let s = (PI * k as f64 / (2.0 * n)).sin();
    4.0 * s * s / (a * a) + m * m
}

/// Ascending eigenvalues of the uniform-mass operator.
pub fn analytic_eigenvalues(cfg: &LatticeConfig, m: f64) -> Vec<f64> {
    (1..cfg.sites()).map(|k| analytic_eigenvalue(cfg, m, k)).collect()
}

/// Closed-form eigenpairs for `U = 0`.
pub fn analytic_modes_zero_potential(cfg: &LatticeConfig) -> SpectralData {
    analytic_modes_uniform_mass(cfg, 0.0)
}

/// Closed-form eigenpairs for `U = m^2`: sine modes shared with the massless
/// case, eigenvalues shifted by `m^2`.
pub fn analytic_modes_uniform_mass(cfg: &LatticeConfig, m: f64) -> SpectralData {
    let big_n = cfg.sites();
    let dim = big_n - 1;
    let norm = (2.0 / big_n as f64).sqrt();
    let mut vectors = Vec::with_capacity(dim * dim);
    for k in 1..big_n {
        for n in 1..big_n {
            let j = (k * n) % (2 * big_n);
            vectors.push(norm * (PI * j as f64 / big_n as f64).sin());
        }
    }
    SpectralData {
        cfg: *cfg,
        eigenvalues: analytic_eigenvalues(cfg, m),
        vectors,
    }
}

/// Largest deviation of the eigenvector matrix from orthonormality, checking
/// both `sum_n v^k_n v^k'_n = delta_kk'` and `sum_k v^k_n v^k_n' = delta_nn'`.
pub fn verify_orthonormality(sd: &SpectralData) -> f64 {
    let d = sd.modes();
    let mut worst = 0.0_f64;
    for k in 0..d {
        let vk = sd.eigenvector(k);
        for kp in k..d {
            let vkp = sd.eigenvector(kp);
            let dot: f64 = vk.iter().zip(vkp).map(|(a, b)| a * b).sum();
            let target = if k == kp { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    let mut gram = vec![0.0; d * d];
    for k in 0..d {
        let v = sd.eigenvector(k);
        for n in 0..d {
            let vn = v[n];
            let row = &mut gram[n * d..(n + 1) * d];
            for (g, &vm) in row.iter_mut().zip(v) {
                *g += vn * vm;
            }
        }
    }
    for n in 0..d {
        for m in 0..d {
            let target = if n == m { 1.0 } else { 0.0 };
            worst = worst.max((gram[n * d + m] - target).abs());
        }
    }
    worst
}

/// Smallest relative gap between consecutive eigenvalues.
pub fn min_relative_gap(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[1].abs().max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min)
}
