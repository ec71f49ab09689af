use super::{Kinematics, Model, PointState};
use crate::error::Result;
use crate::tensor::contract;

/// The seven contributions to the energy density (J/m³).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    /// E1 macro bulk, E2 macro shear, E3 micro bulk, E4 micro shear,
    /// E5 torsion, E6 torsion-momentum coupling, E7 kinetic.
    pub terms: [f64; 7],
    /// E1 + … + E7.
    pub total: f64,
    /// Energy added by the baseline normalization (zero in raw mode).
    pub counterterm: f64,
}

impl EnergyBreakdown {
    /// The potential the dynamics is derived from: `total + counterterm`.
    pub fn potential(&self) -> f64 {
        self.total + self.counterterm
    }

    pub fn term(&self, n: usize) -> f64 {
        self.terms[n - 1]
    }
}

impl Model {
    pub fn energy(&self, state: &PointState) -> Result<EnergyBreakdown> {
        let kin = self.kinematics(state)?;
        Ok(self.energy_with(state, &kin))
    }

    /// Energy potential (including counterterms) as a plain scalar.
    pub fn potential(&self, state: &PointState) -> Result<f64> {
        Ok(self.energy(state)?.potential())
    }

    pub(crate) fn energy_with(&self, state: &PointState, kin: &Kinematics) -> EnergyBreakdown {
        let p = &self.params;
        let rho = kin.rho;
        let gm = p.gamma_macro;
        let gu = p.gamma_micro;
        let e1 = rho * p.c0_macro.powi(2) * kin.pow_a / (gm * (gm - 1.0));
        let e2 = rho * p.cs_macro.powi(2) / 4.0 * kin.dev_g_macro.norm_squared();
        let e3 = rho * p.c0_micro.powi(2) * kin.pow_p / (gu * (gu - 1.0));
        let e4 = rho * p.cs_micro.powi(2) / 4.0 * kin.dev_g_micro.norm_squared();
        let e5 = 0.5
            * (contract(&state.torsion_d, &state.torsion_d) / p.epsilon
                + contract(&state.torsion_b, &state.torsion_b) / p.mu);
        // ε_ijk M^i B^{Aj} D^k_A = −M · Σ_A D_A × B^A
        let e6 = -state.momentum.dot(&kin.torsion_momentum) / rho;
        let e7 = state.momentum.norm_squared() / (2.0 * rho);
        let terms = [e1, e2, e3, e4, e5, e6, e7];
        EnergyBreakdown {
            terms,
            total: e1 + e2 + e3 + e4 + e5 + e6 + e7,
            counterterm: self.counter.energy(kin.det_a, kin.det_p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::BaselineMode;
    use crate::params::MaterialParams;
    use crate::tensor::{Mat3, Vec3};

    #[test]
    fn reference_state_terms() {
        let p = MaterialParams::reference();
        let m = Model::raw(p).unwrap();
        let e = m.energy(&PointState::reference()).unwrap();
        let g = p.gamma_macro;
        let gu = p.gamma_micro;
        assert!((e.term(1) - p.rho0 * p.c0_macro.powi(2) / (g * (g - 1.0))).abs() < 1e-6);
        assert!((e.term(3) - p.rho0 * p.c0_micro.powi(2) / (gu * (gu - 1.0))).abs() < 1e-6);
        for n in [2, 4, 5, 6, 7] {
            assert_eq!(e.term(n), 0.0, "E{n}");
        }
        assert_eq!(e.total, e.terms.iter().sum::<f64>());
    }

    #[test]
    fn kinetic_term_without_torsion() {
        let m = Model::raw(MaterialParams::reference()).unwrap();
        let mut s = PointState::reference();
        s.momentum = Vec3::new(3.0, 0.0, 0.0);
        let e = m.energy(&s).unwrap();
        assert_eq!(e.term(6), 0.0);
        assert!((e.term(7) - 9.0 / (2.0 * 2000.0)).abs() < 1e-15);
    }

    #[test]
    fn stress_free_potential_vanishes_at_rest() {
        let m = Model::new(MaterialParams::reference(), BaselineMode::StressFree).unwrap();
        let e = m.energy(&PointState::reference()).unwrap();
        assert!(e.potential().abs() < 1e-6 * e.total);
    }

    #[test]
    fn equal_frames_give_matching_deviatoric_terms() {
        let mut p = MaterialParams::reference();
        p.cs_micro = p.cs_macro;
        let m = Model::raw(p).unwrap();
        let mut s = PointState::reference();
        let x = Mat3::new(1.02, 0.01, 0.0, -0.03, 0.99, 0.02, 0.0, 0.01, 1.01);
        s.distortion = x;
        s.micro_distortion = x;
        let e = m.energy(&s).unwrap();
        assert!((e.term(2) - e.term(4)).abs() <= 1e-12 * e.term(2).abs());
    }
}
