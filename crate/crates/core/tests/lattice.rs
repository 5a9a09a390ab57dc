mod common;

use casimir_core::lattice::{
    build_operator, divergence_term, lattice_integral, potential_at, symmetric_square_gradient, LatticeConfig,
    PotentialSpec,
};
use casimir_core::Error;

#[test]
fn zero_potential_stencil() {
    let cfg = LatticeConfig::new(0.0, 3.0, 1.0).unwrap();
    let op = build_operator(&cfg, &PotentialSpec::Zero).unwrap();
    assert_eq!(op.diag(), &[2.0, 2.0]);
    assert_eq!(op.offdiag(), -1.0);
}

#[test]
fn single_interior_site() {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.5).unwrap();
    let op = build_operator(&cfg, &PotentialSpec::uniform_mass(2.0).unwrap()).unwrap();
    assert_eq!(op.diag(), &[12.0]);
    assert_eq!(op.offdiag(), -4.0);
}

#[test]
fn bessel_diagonal_from_scalar_evaluation() {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.25).unwrap();
    let pot = PotentialSpec::bessel(0.0, 1.0, -0.01).unwrap();
    let op = build_operator(&cfg, &pot).unwrap();
    for n in 1..=3 {
        let x: f64 = 0.25 * n as f64 + 0.01;
        let expected = 32.0 + 0.75 / (x * x);
        assert!((op.diag()[n - 1] - expected).abs() < 1e-12 * expected);
    }
}

#[test]
fn operator_matches_dense_assembly() {
    for big_n in 2..=8 {
        let cfg = LatticeConfig::from_sites(0.2, 0.3, big_n).unwrap();
        let pot = PotentialSpec::bessel(1.5, 3.0, 0.0).unwrap();
        let op = build_operator(&cfg, &pot).unwrap();
        let a = cfg.a();
        for i in 0..big_n - 1 {
            for j in 0..big_n - 1 {
                let dense = if i == j {
                    let x = cfg.x_left() + (i + 1) as f64 * a;
                    2.0 / (a * a) + 2.25 + 8.75 / (x * x)
                } else if i.abs_diff(j) == 1 {
                    -1.0 / (a * a)
                } else {
                    0.0
                };
                let got = if i == j {
                    op.diag()[i]
                } else if i.abs_diff(j) == 1 {
                    op.offdiag()
                } else {
                    0.0
                };
                assert!((dense - got).abs() <= 1e-12 * dense.abs().max(1.0), "N={big_n} ({i},{j})");
            }
        }
    }
}

#[test]
fn half_alpha_is_uniform_mass() {
    let cfg = LatticeConfig::new(0.0, 1.0, 0.01).unwrap();
    let b = build_operator(&cfg, &PotentialSpec::bessel(1.7, 0.5, -0.3).unwrap()).unwrap();
    let u = build_operator(&cfg, &PotentialSpec::uniform_mass(1.7).unwrap()).unwrap();
    assert_eq!(b.diag(), u.diag());
    assert_eq!(potential_at(&PotentialSpec::bessel(2.0, 0.5, -0.01).unwrap(), 0.37).unwrap(), 4.0);
}

#[test]
fn scalar_potential_values() {
    let p = PotentialSpec::bessel(0.0, 1.0, -0.01).unwrap();
    assert!((potential_at(&p, 0.99).unwrap() - 0.75).abs() < 1e-14);
    let p = PotentialSpec::bessel(2.0, 5.0, -0.01).unwrap();
    let v = potential_at(&p, 0.09).unwrap();
    assert!((v - 2479.0).abs() < 1e-9);
    assert_eq!(v, p.at(0.09).unwrap());
}

#[test]
fn rejects_bad_geometry() {
    assert!(matches!(LatticeConfig::new(0.0, 1.0, 0.3), Err(Error::NonIntegralSites { .. })));
    assert!(matches!(LatticeConfig::new(0.0, 1.0, 1.0), Err(Error::TooFewSites { .. })));
    assert!(LatticeConfig::new(1.0, 0.0, 0.1).is_err());
    assert!(PotentialSpec::bessel(0.0, 0.3, -0.01).is_err());
    let cfg = LatticeConfig::new(0.0, 1.0, 0.1).unwrap();
    let inside = PotentialSpec::bessel(0.0, 2.0, 0.05).unwrap();
    assert!(build_operator(&cfg, &inside).is_err());
}

#[test]
fn lattice_integral_examples() {
    assert_eq!(lattice_integral(&[1.0; 5], 0.5).unwrap(), 2.0);
    assert_eq!(lattice_integral(&[0.0, 1.0, 2.0], 1.0).unwrap(), 2.0);
}

#[test]
fn divergence_integrates_to_zero() {
    let phi: Vec<f64> = (0..=40)
        .map(|n| if n == 0 || n == 40 { 0.0 } else { (0.3 * n as f64).sin() + 0.02 * n as f64 })
        .collect();
    let a = 0.05;
    let div: Vec<f64> = (0..=40).map(|n| divergence_term(&phi, n, a).unwrap()).collect();
    let total = lattice_integral(&div, a).unwrap();
    let scale = div.iter().map(|x| x.abs()).fold(0.0, f64::max) * a;
    assert!(total.abs() < 1e-14 * scale.max(1.0), "{total}");
}

#[test]
fn square_gradient_examples() {
    assert_eq!(symmetric_square_gradient(&[0.0, 1.0, 0.0], 1, 1.0).unwrap(), 1.0);
    assert_eq!(symmetric_square_gradient(&[0.0, 3.0, 0.0], 0, 0.5).unwrap(), 36.0);
    assert_eq!(symmetric_square_gradient(&[2.0; 5], 2, 0.1).unwrap(), 0.0);
}
