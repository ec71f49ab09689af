//! Identity suite: pointwise consistency of forces, sources and stress on
//! seeded random states, and agreement of the two convexity tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{convexity_closed_form, hessian_check, BaselineMode};
use crate::error::Result;
use crate::model::{ForceMode, Model, PointState, ThermoForces};
use crate::params::MaterialParams;
use crate::tensor::{Mat3, Vec3};

pub const GRADIENT_TOL: f64 = 1e-6;
pub const CANCELLATION_TOL: f64 = 1e-12;
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    /// Worst value over the sample (a count of mismatches for convexity).
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChecksReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl ChecksReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChecksSettings {
    pub random_states: usize,
    pub param_samples: usize,
    pub convexity_margin: f64,
    pub seed: u64,
}

/// A random admissible state near rest: |A − I|, |P − I| ≤ 0.1 entrywise,
/// velocities of order 10 m/s and torsion fields whose energy is
/// comparable to the elastic part.
pub fn random_state(rng: &mut impl Rng, p: &MaterialParams) -> PointState {
    let mut u = |s: f64| rng.gen_range(-s..s);
    let m = p.rho0 * 10.0;
    let mut s = PointState {
        momentum: Vec3::new(u(m), u(m), u(m)),
        distortion: Mat3::identity(),
        micro_distortion: Mat3::identity(),
        torsion_b: Mat3::zeros(),
        torsion_d: Mat3::zeros(),
    };
    let b = 0.1 * (p.mu * p.rho0).sqrt() * p.cs_macro;
    let d = 0.1 * (p.epsilon * p.rho0).sqrt() * p.cs_macro;
    for x in s.distortion.iter_mut() {
        *x += u(0.1);
    }
    for x in s.micro_distortion.iter_mut() {
        *x += u(0.1);
    }
    for x in s.torsion_b.iter_mut() {
        *x = u(b);
    }
    for x in s.torsion_d.iter_mut() {
        *x = u(d);
    }
    s
}

/// Largest blockwise relative difference between two force sets.
pub fn force_mismatch(a: &ThermoForces, b: &ThermoForces) -> f64 {
    let rel = |x: f64, d: f64| if x > 0.0 { d / x } else { d };
    [
        rel(a.velocity.norm(), (a.velocity - b.velocity).norm()),
        rel(a.macro_stress.norm(), (a.macro_stress - b.macro_stress).norm()),
        rel(a.micro_stress.norm(), (a.micro_stress - b.micro_stress).norm()),
        rel(a.torsion_e.norm(), (a.torsion_e - b.torsion_e).norm()),
        rel(a.torsion_h.norm(), (a.torsion_h - b.torsion_h).norm()),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Parameter set with the three speed ratios that enter the convexity
/// inequalities drawn at random around the reference set.
pub fn random_params(rng: &mut impl Rng, base: &MaterialParams) -> MaterialParams {
    let mut p = *base;
    p.c0_micro = base.c0_micro * rng.gen_range(0.5..2.0);
    p.cs_micro = p.c0_micro * rng.gen_range(0.2..1.5);
    p.c0_macro = base.c0_macro * rng.gen_range(0.01..2.0);
    p.cs_macro = base.cs_macro * rng.gen_range(0.2..1.5);
    p
}

pub fn run_checks(p: &MaterialParams, baseline: BaselineMode, s: &ChecksSettings) -> Result<ChecksReport> {
    let model = Model::new(*p, baseline)?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);

    let (mut grad, mut cancel, mut sym) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..s.random_states {
        let st = random_state(&mut rng, p);
        let cf = model.thermo_forces(&st, ForceMode::ClosedForm)?;
        let fd = model.thermo_forces(&st, ForceMode::Gradient)?;
        grad = grad.max(force_mismatch(&cf, &fd));
        cancel = cancel.max(model.source_cancellation(&st)?.relative());
        let mf = model.stress(&st)?.momentum_flux;
        sym = sym.max((mf - mf.transpose()).norm() / mf.norm());
    }

    // Convexity: the configured set, then a sample kept only where every
    // inequality clears the margin. The inequalities describe the energy
    // without counterterms, whose determinant curvature would stiffen the
    // skew directions, so the Hessian is taken in raw mode.
    let own = hessian_check(p, BaselineMode::Raw)?;
    let own_ok = own.positive_definite == own.closed_form_satisfied;
    let mut mismatches = 0usize;
    let (mut kept, mut convex, mut draws) = (0usize, 0usize, 0usize);
    while kept < s.param_samples && draws < 1000 * s.param_samples.max(1) {
        draws += 1;
        let q = random_params(&mut rng, p);
        let cf = convexity_closed_form(&q);
        if cf.conditions.iter().any(|c| c.margin.abs() <= s.convexity_margin) {
            continue;
        }
        kept += 1;
        let h = hessian_check(&q, BaselineMode::Raw)?;
        convex += usize::from(cf.satisfied);
        if h.positive_definite != cf.satisfied {
            mismatches += 1;
        }
    }

    let outcome = |name, measured: f64, tolerance: f64, detail: String| CheckOutcome {
        name,
        measured,
        tolerance,
        passed: measured <= tolerance,
        detail,
    };
    let n = s.random_states;
    Ok(ChecksReport {
        outcomes: vec![
            outcome(
                "gradient_forces",
                grad,
                GRADIENT_TOL,
                format!("closed form vs finite differences, {n} states"),
            ),
            outcome(
                "source_cancellation",
                cancel,
                CANCELLATION_TOL,
                format!("relaxation energy exchange, {n} states"),
            ),
            outcome(
                "momentum_flux_symmetry",
                sym,
                SYMMETRY_TOL,
                format!("antisymmetric part, {n} states"),
            ),
            CheckOutcome {
                name: "convexity",
                measured: (mismatches + usize::from(!own_ok || !own.closed_form_satisfied)) as f64,
                tolerance: 0.0,
                passed: mismatches == 0 && own_ok && own.closed_form_satisfied && kept == s.param_samples,
                detail: format!(
                    "raw energy; configured set convex={} hessian_positive={}; sample {kept}/{} ({convex} convex), {mismatches} mismatches",
                    own.closed_form_satisfied, own.positive_definite, s.param_samples
                ),
            },
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings(seed: u64) -> ChecksSettings {
        ChecksSettings {
            random_states: 50,
            param_samples: 10,
            convexity_margin: 0.01,
            seed,
        }
    }

    #[test]
    fn reference_set_passes() {
        let r = run_checks(&MaterialParams::reference(), BaselineMode::Raw, &settings(7)).unwrap();
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn stress_free_mode_passes() {
        let r = run_checks(&MaterialParams::reference(), BaselineMode::StressFree, &settings(9)).unwrap();
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn seeded_runs_repeat() {
        let p = MaterialParams::reference();
        let a = run_checks(&p, BaselineMode::Raw, &settings(3)).unwrap();
        let b = run_checks(&p, BaselineMode::Raw, &settings(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nonconvex_set_fails_only_convexity() {
        let mut p = MaterialParams::reference();
        p.cs_macro = 150.0;
        let r = run_checks(&p, BaselineMode::Raw, &settings(1)).unwrap();
        for o in &r.outcomes {
            assert_eq!(o.passed, o.name != "convexity", "{o:?}");
        }
    }
}
