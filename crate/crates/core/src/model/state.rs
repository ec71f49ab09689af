use crate::error::{Error, Result};
use crate::tensor::{read_row_major, write_row_major, Mat3, Vec3};

/// Number of scalar fields in one material point.
pub const NFIELDS: usize = 39;

/// Flat field vector in the order {M or v, A, P, B, D}, each 3×3 block row-major.
pub type FieldVec = [f64; NFIELDS];

pub const OFF_MOMENTUM: usize = 0;
pub const OFF_DISTORTION: usize = 3;
pub const OFF_MICRO: usize = 12;
pub const OFF_TORSION_B: usize = 21;
pub const OFF_TORSION_D: usize = 30;

/// Conservative fields at one material point.
///
/// Storage convention: row = frame index (A for macro frames, a for micro
/// frames), column = the other index. So `distortion[(A, k)]` is A^A_k,
/// `micro_distortion[(a, A)]` is P^a_A, `torsion_b[(A, i)]` is B^{Ai} and
/// `torsion_d[(A, i)]` is D^i_A.
#[derive(Debug, Clone, PartialEq)]
pub struct PointState {
    /// Total momentum density M (kg/(m²·s)), medium plus torsion parts.
    pub momentum: Vec3,
    /// Macroscopic distortion A.
    pub distortion: Mat3,
    /// Microdistortion P.
    pub micro_distortion: Mat3,
    /// Spatial torsion field B.
    pub torsion_b: Mat3,
    /// Temporal torsion field D.
    pub torsion_d: Mat3,
}

impl PointState {
    /// The homogeneous reference state at rest.
    pub fn reference() -> Self {
        Self {
            momentum: Vec3::zeros(),
            distortion: Mat3::identity(),
            micro_distortion: Mat3::identity(),
            torsion_b: Mat3::zeros(),
            torsion_d: Mat3::zeros(),
        }
    }

    pub fn to_fields(&self) -> FieldVec {
        let mut q = [0.0; NFIELDS];
        q[OFF_MOMENTUM..OFF_MOMENTUM + 3].copy_from_slice(self.momentum.as_slice());
        write_row_major(&self.distortion, &mut q[OFF_DISTORTION..OFF_DISTORTION + 9]);
        write_row_major(&self.micro_distortion, &mut q[OFF_MICRO..OFF_MICRO + 9]);
        write_row_major(&self.torsion_b, &mut q[OFF_TORSION_B..OFF_TORSION_B + 9]);
        write_row_major(&self.torsion_d, &mut q[OFF_TORSION_D..OFF_TORSION_D + 9]);
        q
    }

    pub fn from_fields(q: &[f64]) -> Self {
        assert!(q.len() >= NFIELDS, "field vector too short");
        Self {
            momentum: Vec3::new(q[0], q[1], q[2]),
            distortion: read_row_major(&q[OFF_DISTORTION..]),
            micro_distortion: read_row_major(&q[OFF_MICRO..]),
            torsion_b: read_row_major(&q[OFF_TORSION_B..]),
            torsion_d: read_row_major(&q[OFF_TORSION_D..]),
        }
    }

    /// Returns (det A, det P) after checking that both frames preserve
    /// orientation and every entry is finite.
    pub fn admissible_dets(&self) -> Result<(f64, f64)> {
        let finite = self.momentum.iter().all(|x| x.is_finite())
            && [
                &self.distortion,
                &self.micro_distortion,
                &self.torsion_b,
                &self.torsion_d,
            ]
            .iter()
            .all(|m| m.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::Domain("non-finite field value".into()));
        }
        let det_a = self.distortion.determinant();
        if det_a.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain(format!("det(A) = {det_a:e} is not positive")));
        }
        let det_p = self.micro_distortion.determinant();
        if det_p.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain(format!("det(P) = {det_p:e} is not positive")));
        }
        Ok((det_a, det_p))
    }
}

/// Human-readable names of the 39 flat slots. `first` names the leading
/// vector block ("M" for conservative, "v" for primitive vectors).
pub fn field_names(first: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(NFIELDS);
    for i in 1..=3 {
        out.push(format!("{first}{i}"));
    }
    for block in ["A", "P", "B", "D"] {
        for r in 1..=3 {
            for c in 1..=3 {
                out.push(format!("{block}{r}{c}"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip() {
        let mut s = PointState::reference();
        s.momentum = Vec3::new(1.0, 2.0, 3.0);
        s.torsion_d[(2, 1)] = 7.0;
        s.torsion_b[(0, 2)] = -4.0;
        let q = s.to_fields();
        assert_eq!(q[OFF_TORSION_D + 7], 7.0);
        assert_eq!(q[OFF_TORSION_B + 2], -4.0);
        assert_eq!(PointState::from_fields(&q), s);
    }

    #[test]
    fn singular_frames_rejected() {
        let mut s = PointState::reference();
        s.distortion[(0, 0)] = 0.0;
        assert!(matches!(s.admissible_dets(), Err(Error::Domain(_))));
        let mut s = PointState::reference();
        s.micro_distortion = -Mat3::identity();
        assert!(s.admissible_dets().is_err());
    }

    #[test]
    fn names_are_unique() {
        let names = field_names("v");
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), NFIELDS);
        assert_eq!(names[3], "A11");
        assert_eq!(names[38], "D33");
    }
}
