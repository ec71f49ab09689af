use super::{state::NFIELDS, EnergyBreakdown, Kinematics, Model, PointState};
use crate::error::Result;
use crate::tensor::{cross_rows, read_row_major, Mat3, Vec3};

/// How the thermodynamic forces are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForceMode {
    /// Explicit analytic derivatives of the energy.
    #[default]
    ClosedForm,
    /// Central finite differences of [`Model::energy`] (potential including
    /// counterterms), step `1e-6 * max(1, |x|)` per field.
    Gradient,
}

/// Energy derivatives with respect to every field, in the storage
/// convention of [`PointState`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoForces {
    /// v = ∂E/∂M.
    pub velocity: Vec3,
    /// Π = ∂E/∂A, `[(A, k)]`.
    pub macro_stress: Mat3,
    /// π = ∂E/∂P, `[(a, A)]`.
    pub micro_stress: Mat3,
    /// E = ∂E/∂D, `[(A, k)]`.
    pub torsion_e: Mat3,
    /// H = ∂E/∂B, `[(A, k)]`.
    pub torsion_h: Mat3,
    /// π converted to spatial index, `[(A, i)]`: π^i_A = π^B_a F^i_B P^a_A.
    pub micro_stress_spatial: Mat3,
    /// E converted to micro index, `[(a, A)]`: E^a_A = E^B_i F^i_A P^a_B.
    pub torsion_e_micro: Mat3,
}

impl Model {
    pub fn thermo_forces(&self, state: &PointState, mode: ForceMode) -> Result<ThermoForces> {
        match mode {
            ForceMode::ClosedForm => {
                let kin = self.kinematics(state)?;
                Ok(self.forces_with(state, &kin))
            }
            ForceMode::Gradient => self.forces_by_differences(state),
        }
    }

    pub(crate) fn forces_with(&self, state: &PointState, kin: &Kinematics) -> ThermoForces {
        self.forces_and_energy(state, kin).0
    }

    pub(crate) fn forces_and_energy(
        &self,
        state: &PointState,
        kin: &Kinematics,
    ) -> (ThermoForces, EnergyBreakdown) {
        let p = &self.params;
        let e = self.energy_with(state, kin);
        let [e1, e2, e3, e4, _, e6, e7] = e.terms;
        let rho = kin.rho;
        let a = &state.distortion;
        let pm = &state.micro_distortion;
        let m = &state.momentum;
        let f_t = kin.inv_a.transpose();
        let fp_t = kin.inv_p.transpose();

        let torsion_e = state.torsion_d / p.epsilon + cross_rows(m, &state.torsion_b) / rho;
        let torsion_h = state.torsion_b / p.mu - cross_rows(m, &state.torsion_d) / rho;

        let vol = p.gamma_macro * e1 + e2 + e3 + e4 - e6 - e7;
        let mut macro_stress = f_t * vol + a * kin.dev_g_macro * (rho * p.cs_macro.powi(2));
        let mut micro_stress = fp_t
            * (rho * p.c0_micro.powi(2) / p.gamma_micro * kin.pow_p)
            + pm * kin.dev_g_micro * (rho * p.cs_micro.powi(2));
        let (ct_macro, ct_micro) = self.counter.forces(kin.det_a, kin.det_p);
        macro_stress += f_t * ct_macro;
        micro_stress += fp_t * ct_micro;

        let velocity = (m - kin.torsion_momentum) / rho;
        let micro_stress_spatial = pm.transpose() * micro_stress * f_t;
        let torsion_e_micro = pm * torsion_e * kin.inv_a;
        let forces = ThermoForces {
            velocity,
            macro_stress,
            micro_stress,
            torsion_e,
            torsion_h,
            micro_stress_spatial,
            torsion_e_micro,
        };
        (forces, e)
    }

    fn forces_by_differences(&self, state: &PointState) -> Result<ThermoForces> {
        let q = state.to_fields();
        let mut g = [0.0; NFIELDS];
        let mut work = q;
        for n in 0..NFIELDS {
            let h = 1e-6 * q[n].abs().max(1.0);
            work[n] = q[n] + h;
            let up = self.energy(&PointState::from_fields(&work))?;
            work[n] = q[n] - h;
            let down = self.energy(&PointState::from_fields(&work))?;
            work[n] = q[n];
            // Differencing term by term keeps the large bulk terms from
            // swamping the small ones.
            let mut d = (up.counterterm - down.counterterm) / (2.0 * h);
            for t in 0..7 {
                d += (up.terms[t] - down.terms[t]) / (2.0 * h);
            }
            g[n] = d;
        }
        let kin = self.kinematics(state)?;
        let macro_stress = read_row_major(&g[super::OFF_DISTORTION..]);
        let micro_stress = read_row_major(&g[super::OFF_MICRO..]);
        let torsion_h = read_row_major(&g[super::OFF_TORSION_B..]);
        let torsion_e = read_row_major(&g[super::OFF_TORSION_D..]);
        let pm = &state.micro_distortion;
        Ok(ThermoForces {
            velocity: Vec3::new(g[0], g[1], g[2]),
            micro_stress_spatial: pm.transpose() * micro_stress * kin.inv_a.transpose(),
            torsion_e_micro: pm * torsion_e * kin.inv_a,
            macro_stress,
            micro_stress,
            torsion_e,
            torsion_h,
        })
    }
}
