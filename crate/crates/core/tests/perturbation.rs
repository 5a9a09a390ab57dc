use casimir_core::lattice::{build_operator_from_values, LatticeConfig};
use casimir_core::observables::{energy_from_eigenvalues, t11_raw_at_site};
use casimir_core::perturbation::{
    first_order_eigenvector, first_order_energy, first_order_energy_decomposed, first_order_t11,
    second_order_coefficient, verify_linear_response,
};
use casimir_core::artefacts::h_closed;
use casimir_core::spectral::{solve_eigenvalues, solve_modes};
use std::f64::consts::PI;

fn exact_energy(cfg: &LatticeConfig, u: &[f64]) -> f64 {
    energy_from_eigenvalues(&solve_eigenvalues(&build_operator_from_values(cfg, u).unwrap()).unwrap()).unwrap()
}

#[test]
fn vanishing_potential() {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.1).unwrap();
    let u = vec![0.0; cfg.interior()];
    assert_eq!(first_order_energy(&cfg, &u).unwrap(), 0.0);
    for n in 1..cfg.sites() {
        assert_eq!(first_order_t11(&cfg, &u, n).unwrap(), 0.0);
    }
}

#[test]
fn constant_potential_energy() {
    let (m, l) = (0.8, 1.5);
    let cfg = LatticeConfig::new(0.0, l, l / 30.0).unwrap();
    let big_n = cfg.sites() as f64;
    let s: f64 = (1..cfg.sites()).map(|k| 1.0 / (big_n * (PI * k as f64 / (2.0 * big_n)).sin())).sum();
    let e1 = first_order_energy(&cfg, &vec![m * m; cfg.interior()]).unwrap();
    assert!((e1 - m * m * l / 8.0 * s).abs() < 1e-12 * e1);
}

#[test]
fn three_site_finite_difference() {
    let cfg = LatticeConfig::new(0.0, 3.0, 1.0).unwrap();
    let u = [1.0, 2.0];
    let h = 1e-5;
    let fd = (exact_energy(&cfg, &[h, 2.0 * h]) - exact_energy(&cfg, &[-h, -2.0 * h])) / (2.0 * h);
    assert!((first_order_energy(&cfg, &u).unwrap() - fd).abs() < 1e-7 * fd.abs());
}

#[test]
fn constant_potential_t11_against_finite_difference() {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.05).unwrap();
    let u = vec![2.0; cfg.interior()];
    for n in [1, 6, 10] {
        let r = verify_linear_response(&cfg, &u, n).unwrap();
        assert!(r.t11_rel_error() < 1e-6, "n={n}: {r:?}");
    }
    let h = 1e-4;
    let t = |lam: f64| {
        let lu: Vec<f64> = u.iter().map(|x| lam * x).collect();
        t11_raw_at_site(&solve_modes(&build_operator_from_values(&cfg, &lu).unwrap()).unwrap(), &lu, 4).unwrap()
    };
    let fd = (t(h) - t(-h)) / (2.0 * h);
    assert!((first_order_t11(&cfg, &u, 4).unwrap() - fd).abs() < 1e-6 * fd.abs());
}

#[test]
fn decomposition_and_orthogonality() {
    let cfg = LatticeConfig::new(0.0, 2.0, 0.04).unwrap();
    let u: Vec<f64> = (1..cfg.sites()).map(|n| 1.0 + (0.3 * n as f64).sin().powi(2) * 5.0).collect();
    let d = first_order_energy_decomposed(&cfg, &u).unwrap();
    let e = first_order_energy(&cfg, &u).unwrap();
    assert!((d.total() - e).abs() < 1e-10 * e.abs());
    let big_n = cfg.sites() as f64;
    for k in [1, 7, cfg.sites() - 1] {
        let v = first_order_eigenvector(&cfg, &u, k).unwrap();
        let dot: f64 = (1..cfg.sites())
            .map(|n| (2.0 / big_n).sqrt() * (PI * (k * n) as f64 / big_n).sin() * v[n - 1])
            .sum();
        assert!(dot.abs() < 1e-12);
    }
}

#[test]
fn divergent_parts_are_logarithmic() {
    // E1 + (1/4 pi) int U ln a and T1 - (U/4 pi) ln a - (U/8) h stay bounded as a shrinks
    let (l, u0) = (1.0, 3.0);
    let x = 0.25;
    let mut e_vals = Vec::new();
    let mut t_vals = Vec::new();
    for big_n in [40, 80, 160] {
        let cfg = LatticeConfig::new(0.0, l, l / big_n as f64).unwrap();
        let a = cfg.a();
        let u = vec![u0; cfg.interior()];
        let n = (x / a).round() as usize;
        e_vals.push(first_order_energy(&cfg, &u).unwrap() + u0 * l * a.ln() / (4.0 * PI));
        let t = first_order_t11(&cfg, &u, n).unwrap();
        t_vals.push(t - u0 * a.ln() / (4.0 * PI) - u0 / 8.0 * h_closed(big_n, n as i64));
    }
    for v in [&e_vals, &t_vals] {
        let d1 = (v[1] - v[0]).abs();
        let d2 = (v[2] - v[1]).abs();
        assert!(d2 < d1 && d2 < 1e-2 * v[2].abs().max(1.0), "{v:?}");
    }
}

#[test]
fn quadratic_remainder() {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.05).unwrap();
    let m = 1.0;
    let u = vec![m * m; cfg.interior()];
    let lams = [0.002, 0.004, 0.006, 0.008, 0.01];
    let fit = second_order_coefficient(&cfg, &u, &lams).unwrap();
    assert!(fit.residual < 1e-4, "{}", fit.residual);
    let exact: f64 = (1..cfg.sites())
        .map(|k| {
            let w = 2.0 / cfg.a() * (PI * k as f64 / (2.0 * cfg.sites() as f64)).sin();
            -m.powi(4) / (16.0 * w.powi(3))
        })
        .sum();
    assert!((fit.coefficient / exact - 1.0).abs() < 1e-2);
    let fine = LatticeConfig::new(0.0, 1.0, 0.025).unwrap();
    let c2 = second_order_coefficient(&fine, &vec![m * m; fine.interior()], &lams).unwrap().coefficient;
    assert!((c2 / fit.coefficient - 1.0).abs() < 0.05);
    let zero = second_order_coefficient(&cfg, &u, &[0.0, 0.05]).unwrap();
    assert_eq!(zero.samples[0].1, 0.0);
}
