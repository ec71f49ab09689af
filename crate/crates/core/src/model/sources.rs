use super::state::{FieldVec, NFIELDS, OFF_DISTORTION, OFF_MICRO, OFF_TORSION_D};
use super::{Model, PointState, ThermoForces};
use crate::error::Result;
use crate::tensor::{contract, write_row_major};

/// Energy bookkeeping of the relaxation sources at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceBalance {
    /// E^A_i(Π^i_A/α + π^i_A/β) − Π^k_A E^A_k/α − π^A_a E^a_A/β.
    pub residual: f64,
    /// Largest absolute value among the four contractions.
    pub scale: f64,
}

impl SourceBalance {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.residual.abs()
        } else {
            self.residual.abs() / self.scale
        }
    }
}

impl Model {
    /// Right-hand side of the balance laws, in conservative field order.
    pub fn sources(&self, state: &PointState) -> Result<FieldVec> {
        let kin = self.kinematics(state)?;
        Ok(self.sources_from(&self.forces_with(state, &kin)))
    }

    pub(crate) fn sources_from(&self, f: &ThermoForces) -> FieldVec {
        let mut out = [0.0; NFIELDS];
        let inv_alpha = self.params.alpha.reciprocal();
        let inv_beta = self.params.beta.reciprocal();
        let mut d_src = crate::tensor::Mat3::zeros();
        if let Some(ia) = inv_alpha {
            d_src += f.macro_stress * ia;
            write_row_major(&(-f.torsion_e * ia), &mut out[OFF_DISTORTION..OFF_DISTORTION + 9]);
        }
        if let Some(ib) = inv_beta {
            d_src += f.micro_stress_spatial * ib;
            write_row_major(&(-f.torsion_e_micro * ib), &mut out[OFF_MICRO..OFF_MICRO + 9]);
        }
        write_row_major(&d_src, &mut out[OFF_TORSION_D..OFF_TORSION_D + 9]);
        out
    }

    /// Checks that the sources exchange energy between fields without
    /// producing any.
    pub fn source_cancellation(&self, state: &PointState) -> Result<SourceBalance> {
        let kin = self.kinematics(state)?;
        let f = self.forces_with(state, &kin);
        let ia = self.params.alpha.reciprocal().unwrap_or(0.0);
        let ib = self.params.beta.reciprocal().unwrap_or(0.0);
        let terms = [
            contract(&f.torsion_e, &f.macro_stress) * ia,
            contract(&f.torsion_e, &f.micro_stress_spatial) * ib,
            -contract(&f.macro_stress, &f.torsion_e) * ia,
            -contract(&f.micro_stress, &f.torsion_e_micro) * ib,
        ];
        Ok(SourceBalance {
            residual: terms.iter().sum(),
            scale: terms.iter().fold(0.0_f64, |m, t| m.max(t.abs())),
        })
    }
}
