//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use casimir_core::artefacts::{artefact_a, delta_test, f_closed, f_direct, h_closed, h_direct};
use casimir_core::continuum::{e_aw, e_ratio, energy_series_massive, t11_series_massive};
use casimir_core::forces::{continuum_sweep, force_report, left_force, Extrapolation, Geometry};
use casimir_core::lattice::{build_operator, lattice_integral, LatticeConfig, PotentialSpec};
use casimir_core::observables::{
    energy_from_eigenvalues, stress_profile_raw, stress_raw_with_values, stress_uniform_at_site, t11_raw_boundary,
    vacuum_energy_raw, Side,
};
use casimir_core::perturbation::{second_order_coefficient, verify_linear_response};
use casimir_core::renorm::{
    compute_c, determine_chi, renorm_energy, renormalized_energy, t11_subtraction, Provenance, RenormConstants,
    RenormScheme,
};
use casimir_core::spectral::{analytic_eigenvalues, solve_edge_modes, solve_eigenvalues, solve_modes, verify_orthonormality};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

const CLOSED_FORM_REL: f64 = 1e-12;
const MASSLESS_LIMIT_REL: f64 = 1e-6;
const C_INF_TOL: f64 = 5e-4;
const LN_CHI_WINDOW: (f64, f64) = (-2.585, -2.574);
const INTERCEPT_REL: f64 = 0.02;
const SUM_RULE_REL: f64 = 1e-12;
const ARTEFACT_TOL: f64 = 1e-12;
const H_LIMIT_TOL: f64 = 1e-3;
const DELTA_FULL_REL: f64 = 1e-3;
const DELTA_INTERIOR_REL: f64 = 1e-6;
const FIG10_TOL: f64 = 5e-4;
const FIG11_TOL: f64 = 5e-3;
const FIG13_TOL: f64 = 0.1;
const HALF_ALPHA_TOL: f64 = 1e-3;
const AW_TOL: f64 = 1e-4;
const AW_EXPONENT: (f64, f64) = (1.8, 2.2);
const CONTINUUM_REL: f64 = 1e-4;
const LINEAR_RESPONSE_REL: f64 = 1e-6;
const SECOND_ORDER_SPREAD: f64 = 0.05;
const MU_INVARIANCE: f64 = 1e-10;
const ORTHONORMALITY: f64 = 1e-9;
const BOUNDARY_REL: f64 = 1e-12;
const CONSTANCY_REL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn pinned() -> RenormScheme {
    RenormScheme::fixed(RenormConstants::paper_pinned())
}

fn fig10_geometry() -> Geometry {
    Geometry::new(0.0, 1.0, 6.0).unwrap()
}

fn massless_closed_forms() -> Outcome {
    let l = 1.0;
    let mut worst = 0.0_f64;
    for big_n in [2, 10, 100, 1000] {
        let a = l / big_n as f64;
        let cfg = LatticeConfig::new(0.0, l, a).unwrap();
        let eig = solve_eigenvalues(&build_operator(&cfg, &PotentialSpec::Zero).unwrap()).unwrap();
        let e = energy_from_eigenvalues(&eig).unwrap();
        let cot = 1.0 / (PI * a / (4.0 * l)).tan();
        worst = worst.max(rel(e, (cot - 1.0) / (2.0 * a)));
    }
    let a = l / 2000.0;
    let cfg = LatticeConfig::new(0.0, l, a).unwrap();
    let eig = solve_eigenvalues(&build_operator(&cfg, &PotentialSpec::Zero).unwrap()).unwrap();
    let e_ren = renorm_energy(energy_from_eigenvalues(&eig).unwrap(), &cfg, &PotentialSpec::Zero, &pinned()).unwrap();
    let limit = rel(e_ren, -PI / (24.0 * l));
    outcome(
        worst <= CLOSED_FORM_REL && limit <= MASSLESS_LIMIT_REL,
        format!("cotangent form rel {worst:.2e}; renormalized vs -pi/24l rel {limit:.2e} at a=l/2000"),
    )
}

fn constants() -> Outcome {
    let c = compute_c(100_000);
    let fit = determine_chi(1.0, &[20.0, 30.0, 40.0, 50.0, 60.0], |l| l / 4000.0).unwrap();
    let derived = RenormConstants::new(c, fit.ln_chi, Provenance::SelfDetermined);
    let half = 0.5 * (LN_CHI_WINDOW.1 - LN_CHI_WINDOW.0);
    let tau_ok = (derived.ln_tau - (-1.579438)).abs() <= half;
    let chit_ok = (derived.ln_chi_tilde - (-1.76066)).abs() <= half + 0.5 * PI * C_INF_TOL;
    let chi_ok = fit.ln_chi >= LN_CHI_WINDOW.0 && fit.ln_chi <= LN_CHI_WINDOW.1;
    let c_ok = (c - 0.52125).abs() <= C_INF_TOL;
    let icpt_ok = rel(fit.intercept, -0.25) <= INTERCEPT_REL;
    outcome(
        c_ok && chi_ok && icpt_ok && tau_ok && chit_ok,
        format!(
            "c(1e5)={c:.7}; ln chi={:.6}; intercept={:.6}; ln tau={:.6}; ln chi~={:.6}",
            fit.ln_chi, fit.intercept, derived.ln_tau, derived.ln_chi_tilde
        ),
    )
}

fn sum_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0_f64;
    for i in 0..20 {
        let big_n: usize = if i == 0 { 1000 } else { rng.gen_range(2..=400) };
        let l: f64 = rng.gen_range(0.5..4.0);
        let a = l / big_n as f64;
        let x_left: f64 = rng.gen_range(-1.0..1.0);
        let cfg = LatticeConfig::from_sites(x_left, a, big_n).unwrap();
        let pot = match i % 3 {
            0 => PotentialSpec::uniform_mass(rng.gen_range(0.0..5.0)).unwrap(),
            1 => PotentialSpec::bessel(
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.5..6.0),
                x_left - rng.gen_range(0.01..0.5),
            )
            .unwrap(),
            _ => PotentialSpec::Zero,
        };
        let sd = solve_modes(&build_operator(&cfg, &pot).unwrap()).unwrap();
        let profile = stress_profile_raw(&sd, &pot).unwrap();
        let e = vacuum_energy_raw(&sd).unwrap();
        worst = worst.max(rel(lattice_integral(&profile.t00, a).unwrap(), e));
    }
    outcome(worst <= SUM_RULE_REL, format!("worst rel {worst:.2e} over 20 configurations"))
}

fn artefacts() -> Outcome {
    let (l, a) = (1.0_f64, 0.01_f64);
    let big_n = (l / a).round() as usize;
    let sum_a: f64 = (1..=big_n).map(|n| artefact_a(1.5, l, n as i64, a)).sum();
    let sum_h: f64 = (1..=big_n).map(|n| h_closed(big_n, n as i64)).sum();
    let sum_f: f64 = (1..=big_n).map(|n| a * f_closed(l, n as i64, a)).sum();
    let b3 = sum_a.abs() * a * a;
    let b7 = sum_h.abs();
    let b15 = (sum_f + 1.0 / (2.0 * a)).abs() * a;
    let mut forms = 0.0_f64;
    for (l, a) in [(1.0_f64, 0.1_f64), (2.0, 0.01), (1.0, 1e-3)] {
        let nn = (l / a).round() as i64;
        for n in [0, 1, 3, nn / 3, nn - 1, nn] {
            forms = forms.max((h_direct(nn as usize, n) - h_closed(nn as usize, n)).abs());
            forms = forms.max((f_direct(l, n, a) - f_closed(l, n, a)).abs() * a * l);
        }
    }
    let h0 = (h_closed(10_000, 0) - 2.0 / PI).abs();
    let coeffs = [0.7, -1.3, 2.1, 0.4];
    let t = |x: f64| coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]));
    let d = delta_test(1.0, 1.0 / 2000.0, coeffs, (0.1, 0.9));
    let full = rel(d.full_sum, 0.5 * (t(0.0) + t(1.0)));
    let tmax = (0..=1000).map(|i| t(i as f64 / 1000.0).abs()).fold(0.0, f64::max);
    let interior = d.interior_sum.abs() / tmax;
    let pass = b3 <= ARTEFACT_TOL
        && b7 <= ARTEFACT_TOL
        && b15 <= ARTEFACT_TOL
        && forms <= ARTEFACT_TOL
        && h0 <= H_LIMIT_TOL
        && full <= DELTA_FULL_REL
        && interior <= DELTA_INTERIOR_REL;
    outcome(
        pass,
        format!(
            "sum A {b3:.1e}, sum h {b7:.1e}, sum af {b15:.1e}, closed/direct {forms:.1e}, h(1e4,0)-2/pi {h0:.1e}, delta full {full:.1e}, interior {interior:.1e}"
        ),
    )
}

fn fig10_point() -> Outcome {
    let pot = PotentialSpec::bessel(0.0, 1.0, -0.01).unwrap();
    let r = force_report(&pot, &fig10_geometry(), 1.0 / 300.0, &pinned()).unwrap();
    let g = (r.f_global - (-0.246007)).abs();
    let l = (r.f_local - (-0.246225)).abs();
    outcome(
        g <= FIG10_TOL && l <= FIG10_TOL,
        format!("global {:.7}, local {:.7}", r.f_global, r.f_local),
    )
}

fn straight(e: &Extrapolation, spacings: &[f64]) -> bool {
    let span = spacings.iter().cloned().fold(f64::MIN, f64::max) - spacings.iter().cloned().fold(f64::MAX, f64::min);
    e.max_residual <= 0.05 * e.slope.abs() * span
}

fn fig11_extrapolation() -> Outcome {
    let pot = PotentialSpec::bessel(0.0, 10.0, -0.01).unwrap();
    let spacings = [1.0 / 100.0, 1.0 / 150.0, 1.0 / 200.0, 1.0 / 250.0, 1.0 / 300.0];
    let rep = continuum_sweep(&pot, &fig10_geometry(), &spacings, &pinned()).unwrap();
    let g = (rep.global.intercept - (-2.45142)).abs();
    let l = (rep.local.intercept - (-2.45105)).abs();
    let lin = straight(&rep.global, &spacings) && straight(&rep.local, &spacings);
    outcome(
        g <= FIG11_TOL && l <= FIG11_TOL && lin,
        format!(
            "intercepts {:.5} / {:.5}; max residuals {:.1e} / {:.1e}",
            rep.global.intercept, rep.local.intercept, rep.global.max_residual, rep.local.max_residual
        ),
    )
}

fn fig13_extrapolation() -> Outcome {
    let pot = PotentialSpec::bessel(1.0, 5.0, -0.01).unwrap();
    let spacings = [1e-3, 1.0 / 2000.0, 1.0 / 3000.0, 1.0 / 4000.0, 1.0 / 5000.0];
    let (mut g, mut l) = (Vec::new(), Vec::new());
    for &a in &spacings {
        let (fg, fl) = left_force(&pot, 0.0, 0.1, a, &pinned()).unwrap();
        g.push((a, fg));
        l.push((a, fl));
    }
    let eg = casimir_core::forces::extrapolate_to_continuum(&g).unwrap();
    let el = casimir_core::forces::extrapolate_to_continuum(&l).unwrap();
    outcome(
        (eg.intercept - (-56.073)).abs() <= FIG13_TOL && (el.intercept - (-56.026)).abs() <= FIG13_TOL,
        format!("F_L intercepts {:.4} / {:.4}", eg.intercept, el.intercept),
    )
}

fn half_alpha_limit() -> Outcome {
    let pot = PotentialSpec::bessel(0.0, 0.5, -0.01).unwrap();
    let r = force_report(&pot, &fig10_geometry(), 1.0 / 300.0, &pinned()).unwrap();
    let d = (r.f_global - (-PI / 25.0)).abs();
    let dl = (r.f_local - (-PI / 25.0)).abs();
    outcome(
        d <= HALF_ALPHA_TOL && dl <= HALF_ALPHA_TOL,
        format!("global {:.7}, local {:.7}, -pi/25 = {:.7}", r.f_global, r.f_local, -PI / 25.0),
    )
}

fn massive_comparison() -> Outcome {
    let c = RenormConstants::paper_pinned();
    let k_max = 100_000;
    let mut worst = 0.0_f64;
    for i in 0..20 {
        let big_m = 0.1 + 1.9 * i as f64 / 19.0;
        worst = worst.max((e_ratio(big_m, &c, k_max).unwrap() - e_aw(big_m).unwrap()).abs());
    }
    // log-log slope of the difference beyond ml = 2
    let pts: Vec<(f64, f64)> = [2.0, 3.0, 4.0, 5.0, 6.0]
        .iter()
        .map(|&m: &f64| {
            let d = (e_ratio(m, &c, k_max).unwrap() - e_aw(m).unwrap()).abs();
            (m.ln(), d.ln())
        })
        .collect();
    let slope = casimir_core::forces::fit_line(&pts).unwrap().slope;
    outcome(
        worst < AW_TOL && slope >= AW_EXPONENT.0 && slope <= AW_EXPONENT.1,
        format!("max |e - e_AW| {worst:.2e} on [0.1, 2]; growth exponent {slope:.3} on [2, 6]"),
    )
}

fn renormalized_t11_mid(m: f64, l: f64, big_n: usize, scheme: &RenormScheme) -> f64 {
    let cfg = LatticeConfig::new(0.0, l, l / big_n as f64).unwrap();
    let n = big_n / 2;
    let (_, t11) = stress_uniform_at_site(&cfg, m, n).unwrap();
    t11 - t11_subtraction(&cfg, n, m * m, scheme)
}

fn continuum_consistency() -> Outcome {
    let (m, l) = (1.0, 1.0);
    let c = RenormConstants::paper_pinned();
    let scheme = RenormScheme::fixed(c);
    let cfg = LatticeConfig::new(0.0, l, l / 4000.0).unwrap();
    let e_lat = renormalized_energy(&cfg, &PotentialSpec::uniform_mass(m).unwrap(), &scheme).unwrap();
    let e_ser = energy_series_massive(m, l, &c, 100_000).unwrap().value;
    let e_rel = rel(e_lat, e_ser);
    let t_ser = t11_series_massive(m, l, &c, 100_000).unwrap().value;
    let t_coarse = rel(renormalized_t11_mid(m, l, 4000, &scheme), t_ser);
    let t_fine = rel(renormalized_t11_mid(m, l, 20_000, &scheme), t_ser);
    outcome(
        e_rel <= CONTINUUM_REL && t_fine <= CONTINUUM_REL,
        format!("energy rel {e_rel:.2e} at a=l/4000; T11 rel {t_fine:.2e} at a=l/20000 ({t_coarse:.2e} at a=l/4000)"),
    )
}

fn perturbation_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc11);
    let cfg = LatticeConfig::new(0.0, 1.0, 0.05).unwrap();
    let mut worst_e = 0.0_f64;
    let mut worst_t = 0.0_f64;
    for _ in 0..5 {
        let u: Vec<f64> = (0..cfg.interior()).map(|_| rng.gen_range(0.1..20.0)).collect();
        let n = rng.gen_range(1..cfg.sites());
        let r = verify_linear_response(&cfg, &u, n).unwrap();
        worst_e = worst_e.max(r.energy_rel_error());
        worst_t = worst_t.max(r.t11_rel_error());
    }
    // second-order coefficient for a smooth potential at two spacings
    let pot = PotentialSpec::bessel(1.0, 1.5, -0.5).unwrap();
    let coeff = |big_n: usize| {
        let cfg = LatticeConfig::new(0.0, 1.0, 1.0 / big_n as f64).unwrap();
        let u = pot.sample(&cfg).unwrap()[1..big_n].to_vec();
        let scale = 1.0 / u.iter().cloned().fold(0.0, f64::max);
        let lams: Vec<f64> = [-0.1, -0.05, 0.05, 0.1].iter().map(|x| x * scale).collect();
        second_order_coefficient(&cfg, &u, &lams).unwrap().coefficient
    };
    let (c20, c40, c80) = (coeff(20), coeff(40), coeff(80));
    let spread = rel(c20, c80).max(rel(c40, c80));
    let pass = worst_e <= LINEAR_RESPONSE_REL && worst_t <= LINEAR_RESPONSE_REL && spread <= SECOND_ORDER_SPREAD;
    outcome(
        pass,
        format!("E1 rel {worst_e:.1e}, T11 rel {worst_t:.1e}; lambda^2 coefficient {c20:.5}/{c40:.5}/{c80:.5} (spread {spread:.1e})"),
    )
}

fn mu_independence() -> Outcome {
    let a = 1.0 / 300.0;
    let s1 = RenormScheme::free(1.0).unwrap();
    let s10 = RenormScheme::free(10.0).unwrap();
    let mut worst = 0.0_f64;
    for alpha in [1.0, 10.0, 0.5] {
        let pot = PotentialSpec::bessel(0.0, alpha, -0.01).unwrap();
        let r1 = force_report(&pot, &fig10_geometry(), a, &s1).unwrap();
        let r10 = force_report(&pot, &fig10_geometry(), a, &s10).unwrap();
        let rf = force_report(&pot, &fig10_geometry(), a, &pinned()).unwrap();
        for r in [r10, rf] {
            worst = worst.max((r.f_global - r1.f_global).abs() / r1.f_global.abs().max(1.0));
            worst = worst.max((r.f_local - r1.f_local).abs() / r1.f_local.abs().max(1.0));
        }
    }
    // fig. 13 geometry: the net force is invariant, the one-sided F_L is not
    let pot = PotentialSpec::bessel(1.0, 5.0, -0.01).unwrap();
    let geom = Geometry::new(0.0, 0.1, 6.0).unwrap();
    let r1 = force_report(&pot, &geom, 1e-3, &s1).unwrap();
    let r10 = force_report(&pot, &geom, 1e-3, &s10).unwrap();
    worst = worst.max((r10.f_global - r1.f_global).abs() / r1.f_global.abs().max(1.0));
    worst = worst.max((r10.f_local - r1.f_local).abs() / r1.f_local.abs().max(1.0));
    outcome(
        worst <= MU_INVARIANCE,
        format!(
            "worst rel change of net forces {worst:.1e}; one-sided F_L shifts by {:.4} as expected",
            r10.f_left_global - r1.f_left_global
        ),
    )
}

fn property_suite() -> Outcome {
    let cfg = LatticeConfig::new(0.0, 1.0, 1.0 / 400.0).unwrap();
    let pot = PotentialSpec::bessel(1.0, 3.0, -0.05).unwrap();
    let sd = solve_modes(&build_operator(&cfg, &pot).unwrap()).unwrap();
    let ortho = verify_orthonormality(&sd);
    let profile = stress_profile_raw(&sd, &pot).unwrap();
    let big_n = cfg.sites();
    let edge = solve_edge_modes(&build_operator(&cfg, &pot).unwrap()).unwrap();
    let mut boundary = 0.0_f64;
    for (n, side) in [(0, Side::Left), (big_n, Side::Right)] {
        boundary = boundary.max(rel(profile.t00[n], profile.t11[n]));
        boundary = boundary.max(rel(t11_raw_boundary(&edge, side).unwrap(), profile.t11[n]));
    }
    let (m, l) = (1.5, 1.0);
    let ucfg = LatticeConfig::new(0.0, l, l / 200.0).unwrap();
    let upot = PotentialSpec::uniform_mass(m).unwrap();
    let usd = solve_modes(&build_operator(&ucfg, &upot).unwrap()).unwrap();
    let u = vec![m * m; ucfg.interior()];
    let (_, t11) = stress_raw_with_values(&usd, &u).unwrap();
    let phys: Vec<f64> = (0..=ucfg.sites()).map(|n| t11[n] - artefact_a(m, l, n as i64, ucfg.a())).collect();
    let lo = phys.iter().cloned().fold(f64::MAX, f64::min);
    let hi = phys.iter().cloned().fold(f64::MIN, f64::max);
    let mean = phys.iter().sum::<f64>() / phys.len() as f64;
    let spread = (hi - lo) / mean.abs();
    let exact_eigs = analytic_eigenvalues(&ucfg, m);
    let eig_err = usd
        .eigenvalues()
        .iter()
        .zip(&exact_eigs)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / exact_eigs[exact_eigs.len() - 1];
    outcome(
        ortho < ORTHONORMALITY && boundary <= BOUNDARY_REL && spread < CONSTANCY_REL && eig_err < 1e-13,
        format!("orthonormality {ortho:.1e}; eigenvalues {eig_err:.1e}; boundary t00/t11 {boundary:.1e}; uniform-mass T11 spread {spread:.1e}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("massless closed forms", massless_closed_forms),
        ("renormalization constants", constants),
        ("energy sum rule", sum_rule),
        ("artefact identities", artefacts),
        ("fig. 10 point", fig10_point),
        ("fig. 11 extrapolation", fig11_extrapolation),
        ("fig. 13 extrapolation", fig13_extrapolation),
        ("alpha -> 1/2 limit", half_alpha_limit),
        ("massive comparison e vs e_AW", massive_comparison),
        ("continuum-limit consistency", continuum_consistency),
        ("perturbation oracle", perturbation_oracle),
        ("mu independence", mu_independence),
        ("property suite", property_suite),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} [{:02}] {name}: {} ({:.1}s)",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
