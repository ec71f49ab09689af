use crate::params::{MaterialParams, Relaxation};

/// Closed-form characteristic frequencies and speeds.
///
/// `None` marks a quantity that does not exist for the given parameters
/// (negative radicand, or a relaxation parameter that is infinite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSet {
    /// Large-k limit of the acoustic longitudinal branch (rad/s).
    pub omega_inf: Option<f64>,
    /// Cutoffs (k → 0) of the optical branches (rad/s).
    pub omega0: Option<f64>,
    pub omega_s: Option<f64>,
    pub omega_l: Option<f64>,
    /// Low-frequency speeds of the acoustic branches (m/s).
    pub v_l: Option<f64>,
    pub v_s: Option<f64>,
    pub c_l: f64,
    pub c_s: f64,
    pub c_inf: f64,
    /// β at which the band gap closes (1/m).
    pub beta_crit: Option<f64>,
}

impl CutoffSet {
    /// ω0 − ω∞ when both exist.
    pub fn gap_width(&self) -> Option<f64> {
        Some(self.omega0? - self.omega_inf?)
    }
}

fn root(x: f64) -> Option<f64> {
    (x.is_finite() && x >= 0.0).then(|| x.sqrt())
}

fn finite_pair(p: &MaterialParams) -> Option<(f64, f64)> {
    match (p.alpha, p.beta) {
        (Relaxation::Finite(a), Relaxation::Finite(b)) => Some((a, b)),
        _ => None,
    }
}

/// General (α ≠ β) formulas.
pub fn cutoffs(p: &MaterialParams) -> CutoffSet {
    let (r0, eps) = (p.rho0, p.epsilon);
    let (c0, cs, cc0, ccs) = (
        p.c0_micro.powi(2),
        p.cs_micro.powi(2),
        p.c0_macro.powi(2),
        p.cs_macro.powi(2),
    );
    let mut out = CutoffSet {
        omega_inf: None,
        omega0: None,
        omega_s: None,
        omega_l: None,
        v_l: None,
        v_s: None,
        c_l: p.c_long(),
        c_s: p.cs_macro,
        c_inf: p.c_inf(),
        beta_crit: p
            .alpha
            .finite()
            .map(|a| 2.0 * a * ((c0 + 2.0 * cs) / (c0 + 3.0 * cc0)).sqrt()),
    };
    let Some((a, b)) = finite_pair(p) else {
        return with_limits(p, out);
    };
    out.omega_inf = root(r0 * (c0 * (2.0 * a + b) + 4.0 * a * cs) / (3.0 * a * b * b * eps));
    out.omega0 = root(r0 * (c0 * (2.0 * a + b) + 3.0 * b * cc0) / (6.0 * a * a * b * eps));
    out.omega_s = root(
        r0 * (12.0 * a * a * cs - b * (c0 * (2.0 * a + b) + 3.0 * b * (cc0 - 4.0 * ccs)))
            / (6.0 * a * a * b * b * eps),
    );
    out.omega_l = root(
        r0 * (c0 * (2.0 * a + b) * (3.0 * a + b) / 3.0 + 4.0 * b * b * cc0) / (a * a * b * b * eps),
    );
    let vs2 = 4.0 * cs * ccs * a * a
        / (4.0 * cs * a * a - (cc0 - 4.0 * ccs) * b * b - c0 * (2.0 * a + b) * b / 3.0);
    out.v_s = root(vs2);
    let vl2 = 3.0 * c0 * cc0 * a * (2.0 * a + b)
        / (c0 * (2.0 * a + b) * (3.0 * a + b) + 12.0 * b * b * cc0)
        + 4.0 / 3.0 * vs2;
    out.v_l = root(vl2);
    out
}

/// Simplified formulas valid for α = β. Returns `None` otherwise.
pub fn cutoffs_equal_relaxation(p: &MaterialParams) -> Option<CutoffSet> {
    let (a, b) = finite_pair(p)?;
    if a != b {
        return None;
    }
    let (r0, eps) = (p.rho0, p.epsilon);
    let (c0, cs, cc0, ccs) = (
        p.c0_micro.powi(2),
        p.cs_micro.powi(2),
        p.c0_macro.powi(2),
        p.cs_macro.powi(2),
    );
    let vs2 = 4.0 * cs * ccs / (-c0 - cc0 + 4.0 * (cs + ccs));
    Some(CutoffSet {
        omega_inf: root(r0 * (c0 + 4.0 * cs / 3.0) / (a * a * eps)),
        omega0: root(r0 * (c0 + cc0) / (2.0 * a * a * eps)),
        omega_s: root(-r0 * (c0 + cc0 - 4.0 * (cs + ccs)) / (2.0 * a * a * eps)),
        omega_l: root(r0 * (c0 + cc0) / (a * a * eps)).map(|x| 2.0 * x),
        v_l: root(3.0 * c0 * cc0 / (4.0 * (c0 + cc0)) + 4.0 / 3.0 * vs2),
        v_s: root(vs2),
        c_l: p.c_long(),
        c_s: p.cs_macro,
        c_inf: p.c_inf(),
        beta_crit: Some(2.0 * a * ((c0 + 2.0 * cs) / (c0 + 3.0 * cc0)).sqrt()),
    })
}

/// Limits of the general formulas when α or β is infinite.
fn with_limits(p: &MaterialParams, mut out: CutoffSet) -> CutoffSet {
    let (r0, eps) = (p.rho0, p.epsilon);
    let (c0, cs) = (p.c0_micro.powi(2), p.cs_micro.powi(2));
    let (cc0, ccs) = (p.c0_macro.powi(2), p.cs_macro.powi(2));
    match (p.alpha, p.beta) {
        (Relaxation::Infinite, Relaxation::Finite(b)) => {
            out.omega_inf = root(r0 * (2.0 * c0 + 4.0 * cs) / (3.0 * b * b * eps));
            out.omega0 = Some(0.0);
            out.omega_s = root(2.0 * r0 * cs / (b * b * eps));
            out.omega_l = root(2.0 * r0 * c0 / (b * b * eps));
            out.v_s = Some(p.cs_macro);
            out.v_l = Some(out.c_l);
        }
        (Relaxation::Finite(a), Relaxation::Infinite) => {
            out.omega_inf = Some(0.0);
            out.omega0 = root(r0 * (c0 + 3.0 * cc0) / (6.0 * a * a * eps));
            out.omega_s = root(r0 * (12.0 * ccs - c0 - 3.0 * cc0) / (6.0 * a * a * eps));
            out.omega_l = root(r0 * (c0 / 3.0 + 4.0 * cc0) / (a * a * eps));
        }
        _ => {}
    }
    out
}

/// Squared phase velocities of the two rotational polynomials at wave
/// number k: λ² = c∞² + (…)/k².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalRoots {
    /// General formulas, [first polynomial, second polynomial].
    pub lambda_sq: [f64; 2],
    /// α = β formulas when applicable.
    pub lambda_sq_equal: Option<[f64; 2]>,
}

impl RotationalRoots {
    /// Positive phase velocities; `None` for an evanescent root (λ² < 0).
    pub fn speeds(&self) -> [Option<f64>; 2] {
        self.lambda_sq.map(root)
    }
}

pub fn rotational_roots(p: &MaterialParams, k: f64) -> Option<RotationalRoots> {
    let (a, b) = finite_pair(p)?;
    let c2 = p.c_inf().powi(2);
    let (r0, eps) = (p.rho0, p.epsilon);
    let (c0, cs, cc0, ccs) = (
        p.c0_micro.powi(2),
        p.cs_micro.powi(2),
        p.c0_macro.powi(2),
        p.cs_macro.powi(2),
    );
    let k2 = k * k;
    let first = c2 + r0 * (c0 * (2.0 * a + b) + 3.0 * b * cc0) / (6.0 * a * a * b * eps * k2);
    let second = c2
        + r0 * (4.0 * a * a * cs - b * c0 * (2.0 * a + b) / 3.0 - b * b * (cc0 - 4.0 * ccs))
            / (2.0 * a * a * b * b * eps * k2);
    let lambda_sq_equal = (a == b).then(|| {
        [
            c2 + r0 * (c0 + cc0) / (2.0 * a * a * eps * k2),
            c2 - r0 * (c0 + cc0 - 4.0 * (cs + ccs)) / (2.0 * a * a * eps * k2),
        ]
    });
    Some(RotationalRoots {
        lambda_sq: [first, second],
        lambda_sq_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_and_equal_forms_agree() {
        let p = MaterialParams::reference();
        let g = cutoffs(&p);
        let e = cutoffs_equal_relaxation(&p).unwrap();
        let pairs = [
            (g.omega_inf, e.omega_inf),
            (g.omega0, e.omega0),
            (g.omega_s, e.omega_s),
            (g.omega_l, e.omega_l),
            (g.v_l, e.v_l),
            (g.v_s, e.v_s),
            (g.beta_crit, e.beta_crit),
        ];
        for (a, b) in pairs {
            let (a, b) = (a.unwrap(), b.unwrap());
            assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
        }
    }

    #[test]
    fn rotational_forms_agree() {
        let p = MaterialParams::reference();
        for k in [0.1, 3.0, 100.0, 1e4] {
            let r = rotational_roots(&p, k).unwrap();
            let e = r.lambda_sq_equal.unwrap();
            for i in 0..2 {
                assert!((r.lambda_sq[i] - e[i]).abs() <= 1e-12 * e[i].abs());
            }
        }
    }

    #[test]
    fn gap_closes_at_beta_crit() {
        let p = MaterialParams::reference();
        let bc = cutoffs(&p).beta_crit.unwrap();
        let q = p.with_beta(Relaxation::Finite(bc));
        let w = cutoffs(&q).gap_width().unwrap();
        assert!(w.abs() < 1e-6 * cutoffs(&q).omega0.unwrap());
    }

    #[test]
    fn absent_mode_is_none() {
        let mut p = MaterialParams::reference();
        p.cs_macro = 100.0;
        p.cs_micro = 10.0;
        assert!(cutoffs(&p).omega_s.is_none());
    }
}
