//! Independent reference values for the linear analysis.

use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use microtorsion::dispersion::{cutoffs, dispersion_at_k, rotational_roots};
use microtorsion::eigen::complex_eigenvalues;
use microtorsion::equilibrium::BaselineMode;
use microtorsion::linearize::LinearSystem;
use microtorsion::{MaterialParams, Relaxation};

fn reference_system() -> LinearSystem {
    LinearSystem::new(&MaterialParams::reference(), BaselineMode::Raw).unwrap()
}

fn positive_real(k: f64, sys: &LinearSystem) -> Vec<f64> {
    let r = dispersion_at_k(sys, k).unwrap();
    let tol = 1e-7 * r.max_abs();
    r.lambdas.iter().filter(|z| z.re > tol).map(|z| z.re).collect()
}

fn has_close(xs: &[f64], x: f64, tol: f64) -> bool {
    xs.iter().any(|&y| (y - x).abs() <= tol * x.abs())
}

// Hand-evaluated with α = β = 100, ρ₀ = 2000, ε = 2e-5, C₀ = C_s = 600,
// c₀ = c_s = 100: a = ρ₀/(2α²ε) = 5e3, ω0² = a(c₀² + C₀²) = 1.85e9,
// ωs² = a(3c₀² + 3C_s²) = 5.55e9 (with c_s = c₀, C_s = C₀).
#[test]
fn cutoffs_match_hand_values() {
    let c = cutoffs(&MaterialParams::reference());
    assert_relative_eq!(c.omega0.unwrap(), 1.85e9_f64.sqrt(), max_relative = 1e-12);
    assert_relative_eq!(c.omega_s.unwrap(), 5.55e9_f64.sqrt(), max_relative = 1e-12);
    assert_relative_eq!(c.c_l, (600.0_f64.powi(2) * 7.0 / 3.0).sqrt(), max_relative = 1e-14);
    assert_relative_eq!(c.c_inf, 1e5_f64.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(c.omega_inf.unwrap(), 15275.25, max_relative = 1e-6);
    assert_relative_eq!(c.omega_l.unwrap(), 121655.25, max_relative = 1e-6);
    assert_relative_eq!(c.beta_crit.unwrap(), 33.18, max_relative = 1e-3);
}

// ω = kλ at a tiny k approximates the cutoffs directly.
#[test]
fn small_k_frequencies_are_the_cutoffs() {
    let sys = reference_system();
    let c = cutoffs(&sys.params);
    let k = 1e-4;
    let omegas: Vec<f64> = positive_real(k, &sys).iter().map(|l| l * k).collect();
    for w in [c.omega0, c.omega_s, c.omega_l] {
        assert!(has_close(&omegas, w.unwrap(), 1e-6), "{w:?} not in {omegas:?}");
    }
}

#[test]
fn rotational_speed_at_k_100() {
    // λ² = c∞² + ω0²/k² = 1e5 + 1.85e9/1e4.
    let expected = (1e5_f64 + 1.85e5).sqrt();
    assert_relative_eq!(expected, 533.854, max_relative = 1e-5);
    let r = rotational_roots(&MaterialParams::reference(), 100.0).unwrap();
    assert_relative_eq!(r.speeds()[0].unwrap(), expected, max_relative = 1e-12);
    assert!(has_close(&positive_real(100.0, &reference_system()), expected, 1e-9));
}

#[test]
fn acoustic_speeds_at_small_k() {
    let sys = reference_system();
    let c = cutoffs(&sys.params);
    let pos = positive_real(0.01, &sys);
    assert!(has_close(&pos, c.v_s.unwrap(), 1e-6), "{pos:?}");
    assert!(has_close(&pos, c.v_l.unwrap(), 1e-6), "{pos:?}");
    assert_relative_eq!(c.v_s.unwrap(), 113.899, max_relative = 1e-5);
    assert_relative_eq!(c.v_l.unwrap(), 156.827, max_relative = 1e-5);
}

#[test]
fn without_relaxation_the_speeds_are_the_bare_ones() {
    let p = MaterialParams::reference()
        .with_alpha(Relaxation::Infinite)
        .with_beta(Relaxation::Infinite);
    let sys = LinearSystem::new(&p, BaselineMode::Raw).unwrap();
    // The microdistortion has no flux of its own, so only the macroscopic
    // and torsion speeds remain: C_l once, C_s twice, c∞ six times.
    let pos = positive_real(3.0, &sys);
    assert_eq!(pos.len(), 9, "{pos:?}");
    let count = |v: f64| pos.iter().filter(|&&x| (x - v).abs() <= 1e-9 * v).count();
    assert_eq!(count(p.c_long()), 1);
    assert_eq!(count(p.cs_macro), 2);
    assert_eq!(count(p.c_inf()), 6);
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

// Each λ makes M − λI singular, and the power sums match the traces.
#[test]
fn eigenvalues_of_random_complex_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 2, 5, 12, 39] {
        let m = random_matrix(&mut rng, n);
        let lambdas = complex_eigenvalues(&m).unwrap();
        assert_eq!(lambdas.len(), n);
        let norm = m.norm();
        for &l in &lambdas {
            let shifted = &m - DMatrix::identity(n, n) * l;
            let smin = shifted.singular_values().min();
            assert!(smin <= 1e-10 * norm, "n={n} sigma_min {smin}");
        }
        let m2 = &m * &m;
        let s1: Complex64 = lambdas.iter().sum();
        let s2: Complex64 = lambdas.iter().map(|l| l * l).sum();
        assert!((s1 - m.trace()).norm() <= 1e-10 * norm * n as f64);
        assert!((s2 - m2.trace()).norm() <= 1e-10 * m2.norm() * n as f64);
    }
}

#[test]
fn eigenvalues_of_a_known_triangular_matrix() {
    let n = 6;
    let mut m = DMatrix::from_fn(n, n, |r, c| {
        if c > r {
            Complex64::new(0.3 * (r + c) as f64, -0.1)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let diag: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 0.5 - i as f64)).collect();
    for i in 0..n {
        m[(i, i)] = diag[i];
    }
    let mut got = complex_eigenvalues(&m).unwrap();
    got.sort_by(|a, b| a.re.total_cmp(&b.re));
    for (g, d) in got.iter().zip(&diag) {
        assert!((g - d).norm() < 1e-12, "{g} vs {d}");
    }
}
