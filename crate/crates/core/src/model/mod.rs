//! The nonlinear model at a single material point: energy potential,
//! thermodynamic forces, stress and relaxation sources.
//!
//! All operations are pure functions of the state and the (immutable)
//! [`Model`], so they can be evaluated from any number of threads.

mod energy;
mod flux;
mod forces;
mod sources;
mod state;
mod stress;

pub use energy::EnergyBreakdown;
pub use flux::{nonconservative_x, PointFlux};
pub use forces::{ForceMode, ThermoForces};
pub use sources::SourceBalance;
pub use state::{
    field_names, FieldVec, PointState, NFIELDS, OFF_DISTORTION, OFF_MICRO, OFF_MOMENTUM,
    OFF_TORSION_B, OFF_TORSION_D,
};
pub use stress::StressResult;

use crate::equilibrium::{BaselineMode, Counterterms};
use crate::error::{Error, Result};
use crate::params::MaterialParams;
use crate::tensor::{frame_cross, Mat3, Vec3};

/// Material parameters plus the energy normalization in use.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    params: MaterialParams,
    baseline: BaselineMode,
    counter: Counterterms,
}

impl Model {
    pub fn new(params: MaterialParams, baseline: BaselineMode) -> Result<Self> {
        params.validate()?;
        let counter = match baseline {
            BaselineMode::Raw => Counterterms::none(),
            BaselineMode::StressFree => Counterterms::stress_free(&params),
        };
        Ok(Self {
            params,
            baseline,
            counter,
        })
    }

    /// Model with the literal energy potential (no counterterms).
    pub fn raw(params: MaterialParams) -> Result<Self> {
        Self::new(params, BaselineMode::Raw)
    }

    pub fn params(&self) -> &MaterialParams {
        &self.params
    }

    pub fn baseline(&self) -> BaselineMode {
        self.baseline
    }

    pub fn counterterms(&self) -> &Counterterms {
        &self.counter
    }

    /// Mass density ρ₀ det A.
    pub fn density(&self, distortion: &Mat3) -> Result<f64> {
        let det = distortion.determinant();
        if !(det > 0.0) {
            return Err(Error::Domain(format!("det(A) = {det:e} is not positive")));
        }
        Ok(self.params.rho0 * det)
    }

    /// Velocity v = ∂E/∂M = (M − Σ_A D_A × B^A)/ρ.
    pub fn velocity(&self, state: &PointState) -> Result<Vec3> {
        let (det_a, _) = state.admissible_dets()?;
        let rho = self.params.rho0 * det_a;
        Ok((state.momentum - frame_cross(&state.torsion_d, &state.torsion_b)) / rho)
    }

    /// Total momentum from a velocity: M = ρ v + Σ_A D_A × B^A.
    pub fn momentum_from_velocity(&self, velocity: &Vec3, state: &PointState) -> Result<Vec3> {
        let (det_a, _) = state.admissible_dets()?;
        let rho = self.params.rho0 * det_a;
        Ok(velocity * rho + frame_cross(&state.torsion_d, &state.torsion_b))
    }

    pub(crate) fn kinematics(&self, state: &PointState) -> Result<Kinematics> {
        Kinematics::new(&self.params, state)
    }
}

/// Quantities shared by the energy and the forces.
#[derive(Debug, Clone)]
pub(crate) struct Kinematics {
    pub det_a: f64,
    pub det_p: f64,
    pub rho: f64,
    /// F = A⁻¹, stored as F[(k, A)].
    pub inv_a: Mat3,
    /// P⁻¹, stored as [(A, a)].
    pub inv_p: Mat3,
    /// Deviator of G = AᵀA.
    pub dev_g_macro: Mat3,
    /// Deviator of g = PᵀP.
    pub dev_g_micro: Mat3,
    /// Σ_A D_A × B^A.
    pub torsion_momentum: Vec3,
    /// det(A)^(Γ−1) and det(P)^(γ−1).
    pub pow_a: f64,
    pub pow_p: f64,
}

impl Kinematics {
    fn new(params: &MaterialParams, state: &PointState) -> Result<Self> {
        let (det_a, det_p) = state.admissible_dets()?;
        let inv_a = state
            .distortion
            .try_inverse()
            .ok_or_else(|| Error::Domain("A is not invertible".into()))?;
        let inv_p = state
            .micro_distortion
            .try_inverse()
            .ok_or_else(|| Error::Domain("P is not invertible".into()))?;
        let a = &state.distortion;
        let p = &state.micro_distortion;
        Ok(Self {
            det_a,
            det_p,
            rho: params.rho0 * det_a,
            inv_a,
            inv_p,
            dev_g_macro: crate::tensor::deviator(&(a.transpose() * a)),
            dev_g_micro: crate::tensor::deviator(&(p.transpose() * p)),
            torsion_momentum: frame_cross(&state.torsion_d, &state.torsion_b),
            pow_a: det_a.powf(params.gamma_macro - 1.0),
            pow_p: det_p.powf(params.gamma_micro - 1.0),
        })
    }
}
