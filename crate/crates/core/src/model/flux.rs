use super::state::{FieldVec, NFIELDS, OFF_DISTORTION, OFF_MICRO, OFF_TORSION_B, OFF_TORSION_D};
use super::stress::stress_from;
use super::{Model, PointState, ThermoForces};
use crate::error::Result;
use crate::tensor::{levi_civita, Vec3};

/// Everything the finite-volume scheme needs from one state.
#[derive(Debug, Clone)]
pub struct PointFlux {
    /// Conservative part of the x-flux, in field order.
    pub flux: FieldVec,
    pub forces: ThermoForces,
    pub potential: f64,
}

impl Model {
    /// Flux along x¹ of the conservative part of the balance laws.
    ///
    /// M: M_i v¹ − Σ¹_i. B: B^{Ai} v¹ − v^i B^{A1} + ε_{i1j} E^A_j.
    /// D: D^i_A v¹ − v^i D^1_A − ε_{i1j} H_{jA}. A and P carry no flux.
    pub fn flux_x(&self, state: &PointState) -> Result<PointFlux> {
        let kin = self.kinematics(state)?;
        let (forces, energy) = self.forces_and_energy(state, &kin);
        let potential = energy.potential();
        let st = stress_from(state, &forces, potential);
        let v = forces.velocity;
        let mut flux = [0.0; NFIELDS];
        for i in 0..3 {
            flux[i] = state.momentum[i] * v[0] - st.sigma[(0, i)];
        }
        for a in 0..3 {
            for i in 0..3 {
                let mut curl_e = 0.0;
                let mut curl_h = 0.0;
                for j in 0..3 {
                    let e = levi_civita(i, 0, j);
                    if e != 0.0 {
                        curl_e += e * forces.torsion_e[(a, j)];
                        curl_h += e * forces.torsion_h[(a, j)];
                    }
                }
                let b = &state.torsion_b;
                let d = &state.torsion_d;
                flux[OFF_TORSION_B + 3 * a + i] = b[(a, i)] * v[0] - v[i] * b[(a, 0)] + curl_e;
                flux[OFF_TORSION_D + 3 * a + i] = d[(a, i)] * v[0] - v[i] * d[(a, 0)] - curl_h;
            }
        }
        Ok(PointFlux {
            flux,
            forces,
            potential,
        })
    }
}

/// Non-conservative products along x¹, given the velocity and distortion
/// of the state and the x-gradient of the primitive fields.
///
/// A: v¹ ∂A^A_k + δ_{k1} A^A_j ∂v^j. P: v¹ ∂P. B: v^i ∂B^{A1}. D: v^i ∂D^1_A.
pub fn nonconservative_x(v: &Vec3, state: &PointState, grad_w: &[f64]) -> FieldVec {
    let mut out = [0.0; NFIELDS];
    for a in 0..3 {
        for k in 0..3 {
            let n = 3 * a + k;
            let mut x = v[0] * grad_w[OFF_DISTORTION + n];
            if k == 0 {
                for j in 0..3 {
                    x += state.distortion[(a, j)] * grad_w[j];
                }
            }
            out[OFF_DISTORTION + n] = x;
            out[OFF_MICRO + n] = v[0] * grad_w[OFF_MICRO + n];
        }
        for i in 0..3 {
            out[OFF_TORSION_B + 3 * a + i] = v[i] * grad_w[OFF_TORSION_B + 3 * a];
            out[OFF_TORSION_D + 3 * a + i] = v[i] * grad_w[OFF_TORSION_D + 3 * a];
        }
    }
    out
}
