//! Structural properties checked on random inputs.

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use microtorsion::checks::{force_mismatch, random_state};
use microtorsion::config::RunConfig;
use microtorsion::dispersion::{dispersion_at_k, hungarian, rotational_roots};
use microtorsion::equilibrium::BaselineMode;
use microtorsion::linearize::LinearSystem;
use microtorsion::model::{ForceMode, Model};
use microtorsion::{MaterialParams, Relaxation};

fn system() -> &'static LinearSystem {
    static SYS: OnceLock<LinearSystem> = OnceLock::new();
    SYS.get_or_init(|| LinearSystem::new(&MaterialParams::reference(), BaselineMode::Raw).unwrap())
}

fn brute_force(cost: &[Vec<f64>]) -> f64 {
    fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == cost.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for c in 0..cost[row].len() {
            if !used[c] {
                used[c] = true;
                best = best.min(cost[row][c] + go(cost, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    go(cost, 0, &mut vec![false; cost[0].len()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectrum_is_real_symmetric_with_fifteen_zeros(log_k in -1.0f64..4.0) {
        let r = dispersion_at_k(system(), 10f64.powf(log_k)).unwrap();
        let m = r.max_abs();
        prop_assert!(r.max_imag <= 1e-6 * m);
        prop_assert_eq!(r.zero_count(1e-7), 15);
        let n = r.lambdas.len();
        for i in 0..n {
            prop_assert!((r.lambdas[i].re + r.lambdas[n - 1 - i].re).abs() <= 1e-6 * m);
        }
    }

    #[test]
    fn rotational_roots_match_the_spectrum(log_k in -1.0f64..4.0) {
        let k = 10f64.powf(log_k);
        let r = dispersion_at_k(system(), k).unwrap();
        for s in rotational_roots(&system().params, k).unwrap().speeds().into_iter().flatten() {
            let best = r.lambdas.iter().map(|z| (z.re - s).abs() / s).fold(f64::INFINITY, f64::min);
            prop_assert!(best <= 1e-6, "k={} s={} best={}", k, s, best);
        }
    }

    #[test]
    fn equal_relaxation_forms_agree(log_a in 0.0f64..4.0, log_k in -1.0f64..4.0) {
        let a = Relaxation::Finite(10f64.powf(log_a));
        let p = MaterialParams::reference().with_alpha(a).with_beta(a);
        let r = rotational_roots(&p, 10f64.powf(log_k)).unwrap();
        let e = r.lambda_sq_equal.unwrap();
        for i in 0..2 {
            prop_assert!((r.lambda_sq[i] - e[i]).abs() <= 1e-12 * e[i].abs());
        }
    }

    #[test]
    fn pointwise_identities(seed in any::<u64>(), stress_free in any::<bool>()) {
        let p = MaterialParams::reference();
        let mode = if stress_free { BaselineMode::StressFree } else { BaselineMode::Raw };
        let model = Model::new(p, mode).unwrap();
        let s = random_state(&mut ChaCha8Rng::seed_from_u64(seed), &p);
        let cf = model.thermo_forces(&s, ForceMode::ClosedForm).unwrap();
        let fd = model.thermo_forces(&s, ForceMode::Gradient).unwrap();
        prop_assert!(force_mismatch(&cf, &fd) <= 1e-6);
        prop_assert!(model.source_cancellation(&s).unwrap().relative() <= 1e-12);
        let mf = model.stress(&s).unwrap().momentum_flux;
        prop_assert!((mf - mf.transpose()).norm() <= 1e-10 * mf.norm());
    }

    #[test]
    fn config_round_trips(
        rho0 in 100.0f64..1e4,
        beta in prop_oneof![Just(None), (1.0f64..1e3).prop_map(Some)],
        seed in 0..=i64::MAX as u64,
        stress_free in any::<bool>(),
    ) {
        let mut c = RunConfig::default();
        c.params.rho0 = rho0;
        c.params.beta = beta.map_or(Relaxation::Infinite, Relaxation::Finite);
        c.seed = seed;
        c.baseline = if stress_free { BaselineMode::StressFree } else { BaselineMode::Raw };
        let text = c.resolved_toml().unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn hungarian_is_optimal(rows in 1usize..7, cells in prop::collection::vec(0.0f64..10.0, 36)) {
        let cols = rows;
        let cost: Vec<Vec<f64>> = (0..rows).map(|r| cells[r * cols..(r + 1) * cols].to_vec()).collect();
        let assign = hungarian(&cost);
        prop_assert_eq!(assign.len(), rows);
        let mut seen = vec![false; cols];
        for &c in &assign {
            prop_assert!(!seen[c]);
            seen[c] = true;
        }
        let total: f64 = assign.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
        prop_assert!((total - brute_force(&cost)).abs() <= 1e-9);
    }
}
