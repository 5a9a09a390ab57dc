//! Continuum limits for a uniform mass between two Dirichlet points.
//!
//! With `M = m l` and `p_k = pi k`, `s_k = sqrt(M^2 + p_k^2)`:
//!
//! ```text
//! E(m, l)   = -pi/(24 l) + M^2/(4 pi l) ln(chi~ M) + (1/2l)   sum_k [s_k - p_k - M^2/(2 p_k)]
//! T11(m, l) = -pi/(24 l^2) - m^2/(4 pi) ln(tau~ M) + (1/2l^2) sum_k [p_k^2/s_k - p_k + M^2/(2 p_k)]
//! ```
//!
//! The summands are evaluated in algebraically rearranged forms that avoid
//! cancellation, and the truncated tail is estimated from the large-`k`
//! expansion.

use crate::error::{Error, Result};
use crate::renorm::RenormConstants;
use crate::special::{bessel_k1, zeta, zeta_odd, ZETA_MINUS_ONE};
use crate::summation::NeumaierSum;
use std::f64::consts::PI;

/// A truncated series with an estimate of what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    /// Bound on the remainder after the tail correction.
    pub tail_bound: f64,
    pub terms: usize,
}

fn check_ml(m: f64, l: f64) -> Result<f64> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::OutOfDomain { what: "m", value: m });
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::OutOfDomain { what: "l", value: l });
    }
    Ok(m * l)
}

fn check_kmax(k_max: usize) -> Result<()> {
    if k_max == 0 {
        return Err(Error::OutOfDomain { what: "k_max", value: 0.0 });
    }
    Ok(())
}

/// `sum_{k > K} k^-3` and `sum_{k > K} k^-5` to Euler-Maclaurin order.
fn tail_sums(k: f64) -> (f64, f64) {
    let s3 = 1.0 / (2.0 * k * k) - 1.0 / (2.0 * k.powi(3)) + 1.0 / (4.0 * k.powi(4));
    let s5 = 1.0 / (4.0 * k.powi(4)) - 1.0 / (2.0 * k.powi(5));
    (s3, s5)
}

fn tail_remainder(big_m: f64, k: f64) -> f64 {
    (big_m.powi(4) / (16.0 * PI.powi(3)) + 2.0 * big_m.powi(8) / PI.powi(7)) / k.powi(6)
}

/// `sum_{k=1}^{K} [s_k - p_k - M^2/(2 p_k)]` plus the estimated tail.
fn energy_sum(big_m: f64, k_max: usize) -> SeriesEval {
    let m2 = big_m * big_m;
    let m4 = m2 * m2;
    let mut s = NeumaierSum::new();
    for k in (1..=k_max).rev() {
        let p = PI * k as f64;
        let sk = (m2 + p * p).sqrt();
        s.add(-m4 / (2.0 * p * (sk + p) * (sk + p)));
    }
    let (s3, s5) = tail_sums(k_max as f64);
    let tail = -m4 / (8.0 * PI.powi(3)) * s3 + m4 * m2 / (16.0 * PI.powi(5)) * s5;
    SeriesEval {
        value: s.value() + tail,
        tail_bound: tail_remainder(big_m, k_max as f64),
        terms: k_max,
    }
}

/// `sum_{k=1}^{K} [p_k^2/s_k - p_k + M^2/(2 p_k)]` plus the estimated tail.
fn t11_sum(big_m: f64, k_max: usize) -> SeriesEval {
    let m2 = big_m * big_m;
    let m4 = m2 * m2;
    let mut s = NeumaierSum::new();
    for k in (1..=k_max).rev() {
        let p = PI * k as f64;
        let sk = (m2 + p * p).sqrt();
        s.add(m4 * (sk + 2.0 * p) / (2.0 * p * sk * (sk + p) * (sk + p)));
    }
    let (s3, s5) = tail_sums(k_max as f64);
    let tail = 3.0 * m4 / (8.0 * PI.powi(3)) * s3 - 5.0 * m4 * m2 / (16.0 * PI.powi(5)) * s5;
    SeriesEval {
        value: s.value() + tail,
        tail_bound: tail_remainder(big_m, k_max as f64),
        terms: k_max,
    }
}

/// Continuum vacuum energy of the massive field on an interval of length `l`.
pub fn energy_series_massive(m: f64, l: f64, c: &RenormConstants, k_max: usize) -> Result<SeriesEval> {
    let big_m = check_ml(m, l)?;
    check_kmax(k_max)?;
    let sum = energy_sum(big_m, k_max);
    let log = if big_m > 0.0 {
        big_m * big_m / (4.0 * PI * l) * (c.ln_chi_tilde + big_m.ln())
    } else {
        0.0
    };
    Ok(SeriesEval {
        value: -PI / (24.0 * l) + log + sum.value / (2.0 * l),
        tail_bound: sum.tail_bound / (2.0 * l),
        terms: k_max,
    })
}

/// Continuum `T_11` (equal to the force on either wall).
pub fn t11_series_massive(m: f64, l: f64, c: &RenormConstants, k_max: usize) -> Result<SeriesEval> {
    let big_m = check_ml(m, l)?;
    check_kmax(k_max)?;
    let sum = t11_sum(big_m, k_max);
    let log = if big_m > 0.0 {
        m * m / (4.0 * PI) * (c.ln_tau_tilde + big_m.ln())
    } else {
        0.0
    };
    Ok(SeriesEval {
        value: -PI / (24.0 * l * l) - log + sum.value / (2.0 * l * l),
        tail_bound: sum.tail_bound / (2.0 * l * l),
        terms: k_max,
    })
}

/// Small-mass expansion of `T_11` in powers of `(m l/pi)^2` with odd zeta
/// values. Converges for `m l < pi`.
pub fn t11_expansion(m: f64, l: f64, c: &RenormConstants) -> Result<f64> {
    let big_m = check_ml(m, l)?;
    if big_m >= PI {
        return Err(Error::OutOfDomain { what: "m l", value: big_m });
    }
    let x = (big_m / PI).powi(2);
    let mut sum = NeumaierSum::new();
    sum.add(ZETA_MINUS_ONE);
    let mut d = -0.5; // binom(-1/2, 1)
    let mut xp = x;
    for nu in 2..100_000 {
        d *= -(2.0 * nu as f64 - 1.0) / (2.0 * nu as f64);
        xp *= x;
        let term = d * xp * zeta_odd(nu - 1);
        sum.add(term);
        if term.abs() < 1e-18 * sum.value().abs().max(1e-300) {
            break;
        }
    }
    let log = if big_m > 0.0 {
        m * m / (4.0 * PI) * (c.ln_tau_tilde + big_m.ln())
    } else {
        0.0
    };
    Ok(PI / (2.0 * l * l) * sum.value() - log)
}

/// Reference energy `-(m/2 pi) sum_n K_1(2 m l n)/n` for the massive field.
pub fn ambjorn_wolfram(m: f64, l: f64) -> Result<f64> {
    let big_m = check_ml(m, l)?;
    if big_m == 0.0 {
        return Ok(-PI / (24.0 * l));
    }
    Ok(-m / (2.0 * PI) * k1_sum(big_m)?)
}

fn k1_sum(big_m: f64) -> Result<f64> {
    let mut s = NeumaierSum::new();
    for n in 1..10_000_000 {
        let z = 2.0 * big_m * n as f64;
        if z > 700.0 {
            break;
        }
        let t = bessel_k1(z)? / n as f64;
        s.add(t);
        if t < 1e-18 * s.value() {
            break;
        }
    }
    Ok(s.value())
}

/// `e_AW(M) = (12 M/pi^2) sum_n K_1(2 M n)/n`, the reference energy relative
/// to its massless value.
pub fn e_aw(big_m: f64) -> Result<f64> {
    if !(big_m > 0.0) {
        return Err(Error::OutOfDomain { what: "m l", value: big_m });
    }
    Ok(12.0 * big_m / (PI * PI) * k1_sum(big_m)?)
}

/// `e(M) = (E(m,l) + m/4)/E(0,l)` from the lattice-derived series.
pub fn e_ratio(big_m: f64, c: &RenormConstants, k_max: usize) -> Result<f64> {
    if !(big_m > 0.0) {
        return Err(Error::OutOfDomain { what: "m l", value: big_m });
    }
    check_kmax(k_max)?;
    let sum = energy_sum(big_m, k_max);
    Ok(1.0 - 6.0 * big_m / PI - 6.0 * big_m * big_m / (PI * PI) * (c.ln_chi_tilde + big_m.ln())
        - 12.0 / PI * sum.value)
}

/// Both energy ratios at `M = m l`.
pub fn comparison_ratios(big_m: f64, c: &RenormConstants, k_max: usize) -> Result<(f64, f64)> {
    Ok((e_ratio(big_m, c, k_max)?, e_aw(big_m)?))
}

/// `T_11(m, l)/T_11(0, l)`.
pub fn t11_ratio(big_m: f64, c: &RenormConstants, k_max: usize) -> Result<f64> {
    let t = t11_series_massive(big_m, 1.0, c, k_max)?;
    Ok(t.value / (-PI / 24.0))
}

/// `t00(M, x/l) = (12 M^2/pi) sum_k cos(2 pi k x/l)/sqrt(M^2 + (pi k)^2)`, the
/// position-dependent part of the energy density relative to its massless
/// value. The tail bound follows from summation by parts.
pub fn t00_profile_ratio(big_m: f64, x_over_l: f64, k_max: usize) -> Result<SeriesEval> {
    if !(big_m >= 0.0) {
        return Err(Error::OutOfDomain { what: "m l", value: big_m });
    }
    if !(x_over_l > 0.0 && x_over_l < 1.0) {
        return Err(Error::OutOfDomain { what: "x/l", value: x_over_l });
    }
    check_kmax(k_max)?;
    let pref = 12.0 * big_m * big_m / PI;
    let sum = cosine_sum(big_m, x_over_l, k_max);
    let theta = 2.0 * PI * x_over_l;
    let b_next = 1.0 / (big_m * big_m + (PI * (k_max + 1) as f64).powi(2)).sqrt();
    Ok(SeriesEval {
        value: pref * sum,
        tail_bound: pref * b_next / (0.5 * theta).sin().abs(),
        terms: k_max,
    })
}

fn cosine_sum(big_m: f64, x_over_l: f64, k_max: usize) -> f64 {
    let mut s = NeumaierSum::new();
    for k in (1..=k_max).rev() {
        let p = PI * k as f64;
        s.add((2.0 * p * x_over_l).cos() / (big_m * big_m + p * p).sqrt());
    }
    s.value()
}

/// Continuum energy density `E(m,l)/l - (m^2/2) sum_k cos(2 pi k x/l)/sqrt(M^2 + (pi k)^2)`
/// at distance `x` from the left wall.
pub fn t00_continuum(m: f64, l: f64, x: f64, c: &RenormConstants, k_max: usize) -> Result<f64> {
    let big_m = check_ml(m, l)?;
    if !(x > 0.0 && x < l) {
        return Err(Error::OutOfDomain { what: "x", value: x });
    }
    let e = energy_series_massive(m, l, c, k_max)?.value;
    Ok(e / l - 0.5 * m * m * cosine_sum(big_m, x / l, k_max))
}

/// Relative deviation of `sum_{k=1}^{N-1} (1/(N sin(pi k/2N)))^s` from its
/// limit `(2/pi)^s zeta(s)`.
pub fn zeta_limit_check(s: f64, big_n: usize) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::OutOfDomain { what: "s", value: s });
    }
    if big_n < 2 {
        return Err(Error::OutOfDomain { what: "N", value: big_n as f64 });
    }
    let nf = big_n as f64;
    let sum = (1..big_n)
        .rev()
        .map(|k| (nf * (PI * k as f64 / (2.0 * nf)).sin()).powf(-s))
        .collect::<NeumaierSum>()
        .value();
    let target = (2.0 / PI).powf(s) * zeta(s)?;
    Ok(sum / target - 1.0)
}
