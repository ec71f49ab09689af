use super::{Model, PointState, ThermoForces};
use crate::error::Result;
use crate::tensor::{contract, Mat3};

/// Total stress, pressure and momentum flux at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct StressResult {
    /// Σ, `[(k, i)]`.
    pub sigma: Mat3,
    pub pressure: f64,
    /// v^k M_i − Σ^k_i, `[(k, i)]`. Symmetric for every admissible state.
    pub momentum_flux: Mat3,
}

impl Model {
    pub fn stress(&self, state: &PointState) -> Result<StressResult> {
        let kin = self.kinematics(state)?;
        let (f, e) = self.forces_and_energy(state, &kin);
        Ok(stress_from(state, &f, e.potential()))
    }
}

pub(crate) fn stress_from(state: &PointState, f: &ThermoForces, potential: f64) -> StressResult {
    let pressure = state.momentum.dot(&f.velocity)
        + contract(&state.torsion_d, &f.torsion_e)
        + contract(&state.torsion_b, &f.torsion_h)
        - potential;
    // Σ^k_i = −p δ − A^A_i Π^k_A + D^k_A E^A_i + B^{Ak} H_{iA}
    let sigma = -Mat3::identity() * pressure - f.macro_stress.transpose() * state.distortion
        + state.torsion_d.transpose() * f.torsion_e
        + state.torsion_b.transpose() * f.torsion_h;
    let momentum_flux = f.velocity * state.momentum.transpose() - sigma;
    StressResult {
        sigma,
        pressure,
        momentum_flux,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::BaselineMode;
    use crate::params::MaterialParams;
    use crate::tensor::Vec3;

    #[test]
    fn stress_free_reference_has_no_stress() {
        let m = Model::new(MaterialParams::reference(), BaselineMode::StressFree).unwrap();
        let s = m.stress(&PointState::reference()).unwrap();
        assert!(s.sigma.norm() < 1e-6, "{}", s.sigma);
    }

    #[test]
    fn simple_shear_slope() {
        let p = MaterialParams::reference();
        let m = Model::new(p, BaselineMode::StressFree).unwrap();
        let g = 1e-6;
        let sig = |x: f64| {
            let mut st = PointState::reference();
            st.distortion[(0, 1)] = x;
            m.stress(&st).unwrap().sigma
        };
        let slope = (sig(g) - sig(-g)) / (2.0 * g);
        // A is the inverse deformation, so a positive A12 is a negative shear.
        let expected = p.rho0 * p.cs_macro.powi(2);
        assert!((slope[(0, 1)].abs() - expected).abs() < 1e-4 * expected);
        assert!((slope[(1, 0)] - slope[(0, 1)]).abs() < 1e-4 * expected);
    }

    #[test]
    fn flux_symmetric_with_torsion_and_motion() {
        let m = Model::raw(MaterialParams::reference()).unwrap();
        let st = PointState {
            momentum: Vec3::new(5.0, -2.0, 1.0),
            distortion: Mat3::new(1.02, 0.01, 0.0, -0.03, 0.97, 0.02, 0.01, 0.0, 1.01),
            micro_distortion: Mat3::new(1.0, 0.02, 0.01, 0.0, 0.98, -0.01, 0.02, 0.0, 1.03),
            torsion_b: Mat3::new(0.2, 0.1, -0.3, 0.0, 0.1, 0.2, -0.1, 0.05, 0.0),
            torsion_d: Mat3::new(1e-4, 0.0, 2e-4, -1e-4, 1e-4, 0.0, 0.0, 3e-4, -2e-4),
        };
        let s = m.stress(&st).unwrap();
        let asym = (s.momentum_flux - s.momentum_flux.transpose()).norm();
        assert!(asym <= 1e-10 * s.momentum_flux.norm(), "{asym}");
    }
}
