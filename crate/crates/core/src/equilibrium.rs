//! Reference state, energy normalization and convexity checks.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ForceMode, Model, PointState, NFIELDS};
use crate::params::MaterialParams;

/// Normalization of the energy potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMode {
    /// The energy exactly as written, with a pre-stressed reference state.
    #[default]
    Raw,
    /// Determinant-linear counterterms make every force vanish at rest.
    StressFree,
}

impl fmt::Display for BaselineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineMode::Raw => "raw",
            BaselineMode::StressFree => "stress_free",
        })
    }
}

impl FromStr for BaselineMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "raw" => Ok(BaselineMode::Raw),
            "stress_free" | "stress-free" => Ok(BaselineMode::StressFree),
            other => Err(Error::Config(format!(
                "unknown baseline `{other}` (expected raw or stress_free)"
            ))),
        }
    }
}

/// Counterterm energy −E_rest − k_A (det A − 1) − k_P det A (det P − 1).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Counterterms {
    pub k_macro: f64,
    pub k_micro: f64,
    /// Energy of the reference state; subtracting it makes the pressure
    /// (and so Σ) vanish at rest as well.
    pub rest_energy: f64,
}

impl Counterterms {
    pub fn none() -> Self {
        Self::default()
    }

    /// Coefficients evaluated with the same arithmetic as the forces, so the
    /// reference-state forces cancel to the last bit.
    pub fn stress_free(p: &MaterialParams) -> Self {
        let rho = p.rho0 * 1.0;
        let e1 = rho * p.c0_macro.powi(2) * 1.0_f64.powf(p.gamma_macro - 1.0)
            / (p.gamma_macro * (p.gamma_macro - 1.0));
        let e3 = rho * p.c0_micro.powi(2) * 1.0_f64.powf(p.gamma_micro - 1.0)
            / (p.gamma_micro * (p.gamma_micro - 1.0));
        let k_micro = rho * p.c0_micro.powi(2) / p.gamma_micro * 1.0_f64.powf(p.gamma_micro - 1.0);
        Self {
            k_macro: p.gamma_macro * e1 + 0.0 + e3,
            k_micro,
            rest_energy: e1 + e3,
        }
    }

    pub fn is_none(&self) -> bool {
        self.k_macro == 0.0 && self.k_micro == 0.0 && self.rest_energy == 0.0
    }

    pub fn energy(&self, det_a: f64, det_p: f64) -> f64 {
        if self.is_none() {
            return 0.0;
        }
        -self.rest_energy - self.k_macro * (det_a - 1.0) - self.k_micro * det_a * (det_p - 1.0)
    }

    /// Scalar factors multiplying A⁻ᵀ and P⁻ᵀ in the macro and micro stress.
    pub fn forces(&self, det_a: f64, det_p: f64) -> (f64, f64) {
        if self.is_none() {
            return (0.0, 0.0);
        }
        (
            -self.k_macro * det_a - self.k_micro * det_a * (det_p - 1.0),
            -self.k_micro * det_a * det_p,
        )
    }
}

/// Homogeneous state at rest: v = 0, A = P = I, B = D = 0.
pub fn equilibrium_state(_params: &MaterialParams) -> PointState {
    PointState::reference()
}

/// One inequality of the closed-form convexity set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityCondition {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    /// (lhs − rhs)/max(|lhs|, |rhs|); positive when satisfied.
    pub margin: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub conditions: Vec<ConvexityCondition>,
    pub satisfied: bool,
}

impl ConvexityReport {
    pub fn min_margin(&self) -> f64 {
        self.conditions
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Strict inequalities for convexity of the energy at the reference state.
pub fn convexity_closed_form(p: &MaterialParams) -> ConvexityReport {
    let cond = |name, lhs: f64, rhs: f64| {
        let scale = lhs.abs().max(rhs.abs());
        ConvexityCondition {
            name,
            lhs,
            rhs,
            margin: if scale > 0.0 { (lhs - rhs) / scale } else { 0.0 },
            satisfied: lhs > rhs,
        }
    };
    let conditions = vec![
        cond("rho0 > 0", p.rho0, 0.0),
        cond("mu > 0", p.mu, 0.0),
        cond("epsilon > 0", p.epsilon, 0.0),
        cond("c0 > 0", p.c0_micro, 0.0),
        cond("cs > c0/sqrt(6)", p.cs_micro, p.c0_micro / 6f64.sqrt()),
        cond("C0 > c0/sqrt(15)", p.c0_macro, p.c0_micro / 15f64.sqrt()),
        cond(
            "Cs > sqrt(c0^2/3 + C0^2)/2",
            p.cs_macro,
            0.5 * (p.c0_micro.powi(2) / 3.0 + p.c0_macro.powi(2)).sqrt(),
        ),
    ];
    let satisfied = conditions.iter().all(|c| c.satisfied);
    ConvexityReport {
        conditions,
        satisfied,
    }
}

/// Numerical Hessian of the energy at the reference state.
#[derive(Debug, Clone)]
pub struct HessianReport {
    /// All 39 eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue after removing the trivially zero directions.
    pub min_eigenvalue: f64,
    /// Number of directions with (numerically) zero curvature.
    pub trivial_zeros: usize,
    /// ‖H − Hᵀ‖/‖H‖ before symmetrization.
    pub asymmetry: f64,
    /// Sign verdict of the Hessian.
    pub positive_definite: bool,
    /// Verdict of [`convexity_closed_form`].
    pub closed_form_satisfied: bool,
}

/// Second derivatives by central differences of the analytic gradient
/// (step `1e-4 * max(1, |x|)`), then a symmetric eigen solve.
///
/// The curvatures span about twelve decades (1/ρ₀ on the momentum block
/// against ρ₀C₀² on the distortion block), so the sign test runs on the
/// diagonally rescaled matrix D H D, D = diag(|H_nn|^{-1/2}). The rescaling
/// is a congruence and leaves the inertia unchanged.
pub fn hessian_check(params: &MaterialParams, baseline: BaselineMode) -> Result<HessianReport> {
    let model = Model::new(*params, baseline)?;
    let q0 = equilibrium_state(params).to_fields();
    let grad = |q: &[f64]| -> Result<[f64; NFIELDS]> {
        let s = PointState::from_fields(q);
        let f = model.thermo_forces(&s, ForceMode::ClosedForm)?;
        let mut g = [0.0; NFIELDS];
        g[..3].copy_from_slice(f.velocity.as_slice());
        crate::tensor::write_row_major(&f.macro_stress, &mut g[3..12]);
        crate::tensor::write_row_major(&f.micro_stress, &mut g[12..21]);
        crate::tensor::write_row_major(&f.torsion_h, &mut g[21..30]);
        crate::tensor::write_row_major(&f.torsion_e, &mut g[30..39]);
        Ok(g)
    };
    let mut h = DMatrix::<f64>::zeros(NFIELDS, NFIELDS);
    let mut q = q0;
    for n in 0..NFIELDS {
        let step = 1e-4 * q0[n].abs().max(1.0);
        q[n] = q0[n] + step;
        let up = grad(&q)?;
        q[n] = q0[n] - step;
        let down = grad(&q)?;
        q[n] = q0[n];
        for m in 0..NFIELDS {
            h[(m, n)] = (up[m] - down[m]) / (2.0 * step);
        }
    }
    let asymmetry = (&h - h.transpose()).norm() / h.norm();
    let hs = (&h + h.transpose()) * 0.5;

    let diag: Vec<f64> = (0..NFIELDS).map(|n| hs[(n, n)].abs()).collect();
    let dmax = diag.iter().cloned().fold(0.0, f64::max);
    let scale: Vec<f64> = diag
        .iter()
        .map(|&d| if d > 1e-14 * dmax { d.powf(-0.5) } else { 0.0 })
        .collect();
    let mut scaled = hs.clone();
    for r in 0..NFIELDS {
        for c in 0..NFIELDS {
            scaled[(r, c)] *= scale[r] * scale[c];
        }
    }
    let mut scaled_eig: Vec<f64> = SymmetricEigen::new(scaled).eigenvalues.iter().cloned().collect();
    scaled_eig.sort_by(f64::total_cmp);
    // Rescaled curvatures are O(1); differencing noise sits near 1e-8.
    let trivial_zeros = scaled_eig.iter().filter(|x| x.abs() < 1e-6).count();

    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(hs).eigenvalues.iter().cloned().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let mut by_magnitude = eigenvalues.clone();
    by_magnitude.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let min_eigenvalue = by_magnitude[trivial_zeros..]
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let min_scaled = scaled_eig
        .iter()
        .filter(|x| x.abs() >= 1e-6)
        .cloned()
        .fold(f64::INFINITY, f64::min);

    Ok(HessianReport {
        eigenvalues,
        min_eigenvalue,
        trivial_zeros,
        asymmetry,
        positive_definite: min_scaled > 0.0,
        closed_form_satisfied: convexity_closed_form(params).satisfied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_convexity_margins() {
        let p = MaterialParams::reference();
        let r = convexity_closed_form(&p);
        assert!(r.satisfied);
        let cs = r.conditions.iter().find(|c| c.name.starts_with("Cs")).unwrap();
        assert!((cs.rhs - 301.39).abs() < 0.01);
    }

    #[test]
    fn boundary_case_is_violated() {
        let mut p = MaterialParams::reference();
        p.cs_micro = p.c0_micro / 6f64.sqrt();
        assert!(!convexity_closed_form(&p).satisfied);
        let mut p = MaterialParams::reference();
        p.c0_macro = 10.0;
        assert!(!convexity_closed_form(&p).satisfied);
    }

    #[test]
    fn counterterms_cancel_reference_forces() {
        let p = MaterialParams::reference().with_adiabatic(1.7, 2.4);
        let m = Model::new(p, BaselineMode::StressFree).unwrap();
        let f = m
            .thermo_forces(&PointState::reference(), ForceMode::ClosedForm)
            .unwrap();
        assert!(f.macro_stress.iter().all(|&x| x == 0.0), "{}", f.macro_stress);
        assert!(f.micro_stress.iter().all(|&x| x == 0.0), "{}", f.micro_stress);
    }

    #[test]
    fn hessian_reference_is_positive() {
        let r = hessian_check(&MaterialParams::reference(), BaselineMode::Raw).unwrap();
        assert!(r.positive_definite && r.min_eigenvalue > 0.0, "{r:?}");
        assert!(r.asymmetry < 1e-8);
        assert_eq!(r.eigenvalues.len(), NFIELDS);
    }

    #[test]
    fn hessian_detects_soft_shear() {
        let mut p = MaterialParams::reference();
        p.cs_macro = 150.0; // bound is 301.4
        let r = hessian_check(&p, BaselineMode::Raw).unwrap();
        assert!(!r.closed_form_satisfied);
        assert!(r.min_eigenvalue < 0.0 && !r.positive_definite);
    }
}
