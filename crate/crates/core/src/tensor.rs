//! Small 3×3 helpers shared by the model and the solver.
//!
//! Every two-index field is stored as a `Matrix3` whose row is the frame
//! index (macro frame `A` or micro frame `a`) and whose column is the
//! remaining index. Metrics are the identity, so raised and lowered indices
//! share storage.

use nalgebra::{Matrix3, Vector3};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;

/// Levi-Civita symbol ε_{ijk} for indices in {0, 1, 2}.
#[inline]
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Σ_A D_A × B^A, i.e. (ε_{ijk} D[A][j] B[A][k])_i.
pub fn frame_cross(d: &Mat3, b: &Mat3) -> Vec3 {
    let mut out = Vec3::zeros();
    for i in 0..3 {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                let e = levi_civita(i, j, k);
                if e != 0.0 {
                    for a in 0..3 {
                        s += e * d[(a, j)] * b[(a, k)];
                    }
                }
            }
        }
        out[i] = s;
    }
    out
}

/// Row-wise cross product with a vector: out[A][k] = ε_{kij} m^i x[A][j].
pub fn cross_rows(m: &Vec3, x: &Mat3) -> Mat3 {
    let mut out = Mat3::zeros();
    for a in 0..3 {
        for k in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let e = levi_civita(k, i, j);
                    if e != 0.0 {
                        s += e * m[i] * x[(a, j)];
                    }
                }
            }
            out[(a, k)] = s;
        }
    }
    out
}

/// Deviatoric part X − tr(X)/3 · I.
#[inline]
pub fn deviator(x: &Mat3) -> Mat3 {
    x - Mat3::identity() * (x.trace() / 3.0)
}

/// Frobenius inner product Σ x_ij y_ij.
#[inline]
pub fn contract(x: &Mat3, y: &Mat3) -> f64 {
    x.component_mul(y).sum()
}

/// Flatten row-major.
#[inline]
pub fn write_row_major(x: &Mat3, out: &mut [f64]) {
    for r in 0..3 {
        for c in 0..3 {
            out[3 * r + c] = x[(r, c)];
        }
    }
}

#[inline]
pub fn read_row_major(src: &[f64]) -> Mat3 {
    Mat3::new(
        src[0], src[1], src[2], src[3], src[4], src[5], src[6], src[7], src[8],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_is_antisymmetric() {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(levi_civita(i, j, k), -levi_civita(j, i, k));
                    assert_eq!(levi_civita(i, j, k), levi_civita(j, k, i));
                }
            }
        }
    }

    #[test]
    fn frame_cross_matches_vector_cross_per_row() {
        let d = Mat3::new(1.0, 2.0, 3.0, 0.5, -1.0, 2.0, 0.0, 0.0, 1.0);
        let b = Mat3::new(-1.0, 0.0, 4.0, 2.0, 2.0, 2.0, 1.0, 1.0, 0.0);
        let mut expect = Vec3::zeros();
        for a in 0..3 {
            let dr = Vec3::new(d[(a, 0)], d[(a, 1)], d[(a, 2)]);
            let br = Vec3::new(b[(a, 0)], b[(a, 1)], b[(a, 2)]);
            expect += dr.cross(&br);
        }
        assert!((frame_cross(&d, &b) - expect).norm() < 1e-14);
    }

    #[test]
    fn row_major_round_trip() {
        let x = Mat3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0);
        let mut buf = [0.0; 9];
        write_row_major(&x, &mut buf);
        assert_eq!(buf, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        assert_eq!(read_row_major(&buf), x);
    }
}
