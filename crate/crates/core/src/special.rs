//! Special functions used by the continuum formulas.

use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Modified Bessel function of the second kind `K_1(z)` for `z > 0`.
///
/// Uses the ascending series for `z <= 2` and Steed's continued fraction
/// above.
pub fn bessel_k1(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::OutOfDomain { what: "z", value: z });
    }
    Ok(if z <= 2.0 { k1_series(z) } else { k1_fraction(z) })
}

fn k1_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    // I_1 and the digamma-weighted series share the term (z^2/4)^k / (k!(k+1)!)
    let mut term = 1.0;
    let mut i1 = 0.0;
    let mut psi_sum = 0.0;
    let mut h = 0.0;
    for k in 0..60 {
        if k > 0 {
            term *= q / (k as f64 * (k + 1) as f64);
            h += 1.0 / k as f64;
        }
        let psi = 2.0 * (h - EULER_GAMMA) + 1.0 / (k + 1) as f64;
        i1 += term;
        psi_sum += psi * term;
        if term < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * z * i1;
    1.0 / z + (0.5 * z).ln() * i1 - 0.25 * z * psi_sum
}

fn k1_fraction(x: f64) -> f64 {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        a -= 2.0 * (i - 1) as f64;
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    let h = a1 * h;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    k0 * (x + 0.5 - h) / x
}

const BORWEIN_N: usize = 40;

fn borwein_weights() -> &'static [f64] {
    static W: OnceLock<Vec<f64>> = OnceLock::new();
    W.get_or_init(|| {
        let n = BORWEIN_N;
        let mut d = Vec::with_capacity(n + 1);
        let mut term = 1.0 / n as f64;
        let mut acc = term;
        d.push(n as f64 * acc);
        for i in 1..=n {
            let i_f = i as f64;
            term *= ((n + i - 1) as f64) * 4.0 * ((n - i + 1) as f64) / ((2.0 * i_f - 1.0) * (2.0 * i_f));
            acc += term;
            d.push(n as f64 * acc);
        }
        d
    })
}

fn zeta_borwein(s: f64) -> f64 {
    let d = borwein_weights();
    let n = BORWEIN_N;
    let dn = d[n];
    let mut sum = 0.0;
    for k in (0..n).rev() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - dn) / ((k + 1) as f64).powf(s);
    }
    -sum / (dn * (1.0 - 2.0_f64.powf(1.0 - s)))
}

fn zeta_direct(s: f64) -> f64 {
    let mut sum = 0.0;
    for k in (1..=12).rev() {
        sum += (k as f64).powf(-s);
    }
    sum
}

/// Riemann zeta for real `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::OutOfDomain { what: "s", value: s });
    }
    Ok(if s >= 40.0 { zeta_direct(s) } else { zeta_borwein(s) })
}

/// `zeta(2 j + 1)` for `j >= 1`, cached for the values used by power series.
pub fn zeta_odd(j: usize) -> f64 {
    static CACHE: OnceLock<Vec<f64>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..40).map(|j| zeta_borwein(2.0 * j as f64 + 1.0)).collect());
    if j == 0 {
        return f64::INFINITY;
    }
    match cache.get(j) {
        Some(&z) => z,
        None => zeta_direct(2.0 * j as f64 + 1.0),
    }
}

/// `zeta(-1) = -1/12`, the value assigned to the divergent `sum k`.
pub const ZETA_MINUS_ONE: f64 = -1.0 / 12.0;
