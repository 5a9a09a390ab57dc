//! Lattice artefacts of the stress tensor near Dirichlet boundaries.
//!
//! For a uniform mass on an interval of length `l = N a`, the raw lattice
//! `T_11` differs from its continuum value by a site-dependent artefact
//! `A(m, l, n, a)`. In the continuum limit it decomposes as
//! `A = 1/(2 a l) + f(l, n, a) + (m^2/8) h(N, n) + O(a)`, where `h` and `f`
//! have closed forms in terms of cotangents and are concentrated within a few
//! sites of the boundaries.
//!
//! All direct sums run over `k = 1..N-1` with trigonometric arguments reduced
//! modulo the period before evaluation.

use crate::summation::NeumaierSum;
use std::f64::consts::PI;

/// `N = round(l / a)`.
pub fn site_count(l: f64, a: f64) -> usize {
    (l / a).round() as usize
}

/// `cos(2 pi k n / N)` with the phase reduced exactly.
fn cos_phase(k: usize, n: i64, big_n: usize) -> f64 {
    let j = (k as i64 * n).rem_euclid(big_n as i64);
    (2.0 * PI * j as f64 / big_n as f64).cos()
}

/// `cot(pi (offset + sign * n) / N)`, reducing `sign * n` modulo `N` into a
/// window around zero so the cotangent is evaluated near its principal branch.
fn cot_shifted(offset: f64, sign: i64, n: i64, big_n: usize) -> f64 {
    let bn = big_n as i64;
    let mut j = (sign * n).rem_euclid(bn);
    if 2 * j > bn {
        j -= bn;
    }
    1.0 / (PI * (offset + j as f64) / big_n as f64).tan()
}

/// Direct artefact sum
/// `A = -sum_k 2 N^2 sin^4(pi k/2N) cos(2 pi k n/N) / (l^2 sqrt((m l)^2 + 4 N^2 sin^2(pi k/2N)))`.
pub fn artefact_a(m: f64, l: f64, n: i64, a: f64) -> f64 {
    let big_n = site_count(l, a);
    let nf = big_n as f64;
    let ml2 = (m * l) * (m * l);
    let mut s = NeumaierSum::new();
    for k in (1..big_n).rev() {
        let sn = (PI * k as f64 / (2.0 * nf)).sin();
        let s2 = sn * sn;
        let num = 2.0 * nf * nf * s2 * s2 * cos_phase(k, n, big_n);
        s.add(num / (ml2 + 4.0 * nf * nf * s2).sqrt());
    }
    -s.value() / (l * l)
}

/// `h(N, n) = (1/N) sum_k sin(pi k/2N) cos(2 pi k n/N)`.
pub fn h_direct(big_n: usize, n: i64) -> f64 {
    let nf = big_n as f64;
    let mut s = NeumaierSum::new();
    for k in (1..big_n).rev() {
        s.add((PI * k as f64 / (2.0 * nf)).sin() * cos_phase(k, n, big_n));
    }
    s.value() / nf
}

/// Closed form `h(N, n) = (1/4N)[cot(pi/4N + pi n/N) + cot(pi/4N - pi n/N) - 2]`.
pub fn h_closed(big_n: usize, n: i64) -> f64 {
    let c = cot_shifted(0.25, 1, n, big_n) + cot_shifted(0.25, -1, n, big_n);
    (c - 2.0) / (4.0 * big_n as f64)
}

/// `f(l, n, a) = -(1/(a l)) sum_k sin^3(pi k/2N) cos(2 pi k n/N) - 1/(2 a l)`.
pub fn f_direct(l: f64, n: i64, a: f64) -> f64 {
    let big_n = site_count(l, a);
    let nf = big_n as f64;
    let mut s = NeumaierSum::new();
    for k in (1..big_n).rev() {
        let sn = (PI * k as f64 / (2.0 * nf)).sin();
        s.add(sn * sn * sn * cos_phase(k, n, big_n));
    }
    -s.value() / (a * l) - 1.0 / (2.0 * a * l)
}

/// Closed form of `f` in cotangents.
pub fn f_closed(l: f64, n: i64, a: f64) -> f64 {
    let big_n = site_count(l, a);
    let c3 = cot_shifted(0.75, 1, n, big_n) + cot_shifted(0.75, -1, n, big_n);
    let c1 = cot_shifted(0.25, 1, n, big_n) + cot_shifted(0.25, -1, n, big_n);
    (c3 - 3.0 * c1) / (16.0 * a * l)
}

/// Boundary kernel `delta = -2 a f`.
pub fn delta(l: f64, n: i64, a: f64) -> f64 {
    -2.0 * a * f_closed(l, n, a)
}

/// `delta_1 = (1/2l)[cot(pi a/4l + pi n a/l) + cot(pi a/4l - pi n a/l)]`.
pub fn delta1(l: f64, n: i64, a: f64) -> f64 {
    let big_n = site_count(l, a);
    (cot_shifted(0.25, 1, n, big_n) + cot_shifted(0.25, -1, n, big_n)) / (2.0 * l)
}

/// `delta_2 = -(1/2l)[cot(3 pi a/4l + pi n a/l) + cot(3 pi a/4l - pi n a/l)]`.
pub fn delta2(l: f64, n: i64, a: f64) -> f64 {
    let big_n = site_count(l, a);
    -(cot_shifted(0.75, 1, n, big_n) + cot_shifted(0.75, -1, n, big_n)) / (2.0 * l)
}

/// All artefact quantities at one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArtefactEval {
    pub a_direct: f64,
    pub h_direct: f64,
    pub h_closed: f64,
    pub f_direct: f64,
    pub f_closed: f64,
    pub delta: f64,
}

pub fn evaluate(m: f64, l: f64, n: i64, a: f64) -> ArtefactEval {
    let big_n = site_count(l, a);
    ArtefactEval {
        a_direct: artefact_a(m, l, n, a),
        h_direct: h_direct(big_n, n),
        h_closed: h_closed(big_n, n),
        f_direct: f_direct(l, n, a),
        f_closed: f_closed(l, n, a),
        delta: delta(l, n, a),
    }
}

/// Result of integrating a cubic against the boundary kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTest {
    /// Trapezoidal lattice sum over the whole interval.
    pub full_sum: f64,
    /// Plain sum over the sites inside the window.
    pub interior_sum: f64,
}

/// Integrate `t(x) = c0 + c1 x + c2 x^2 + c3 x^3` on `[0, l]` against `delta`.
/// The full sum tends to `(t(0) + t(l))/2`; a window away from both ends sees
/// almost nothing.
pub fn delta_test(l: f64, a: f64, coeffs: [f64; 4], window: (f64, f64)) -> DeltaTest {
    let big_n = site_count(l, a);
    let t = |x: f64| coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]));
    let w: Vec<f64> = (0..=big_n)
        .map(|n| a * delta(l, n as i64, a) * t(n as f64 * a))
        .collect();
    let mut upper = NeumaierSum::new();
    let mut lower = NeumaierSum::new();
    for &v in &w[1..=big_n] {
        upper.add(v);
    }
    for &v in &w[..big_n] {
        lower.add(v);
    }
    let n1 = (window.0 / a).round().max(0.0) as usize;
    let n2 = ((window.1 / a).round() as usize).min(big_n);
    let interior: f64 = if n1 <= n2 {
        w[n1..=n2].iter().copied().collect::<NeumaierSum>().value()
    } else {
        0.0
    };
    DeltaTest {
        full_sum: 0.5 * (upper.value() + lower.value()),
        interior_sum: interior,
    }
}
