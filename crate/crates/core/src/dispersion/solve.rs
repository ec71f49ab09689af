use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::complex_eigenvalues;
use crate::error::{Error, Result};
use crate::linearize::LinearSystem;

/// Phase velocities at one wave number.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolveResult {
    pub k: f64,
    /// All 39 eigenvalues of C + (i/k)S, sorted by real part.
    pub lambdas: Vec<Complex64>,
    /// Largest |Im λ|.
    pub max_imag: f64,
}

impl EigenSolveResult {
    pub fn max_abs(&self) -> f64 {
        self.lambdas.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues with |λ| ≤ `rel`·max|λ|.
    pub fn zero_count(&self, rel: f64) -> usize {
        let tol = rel * self.max_abs();
        self.lambdas.iter().filter(|z| z.norm() <= tol).count()
    }

    /// Real parts of the eigenvalues above `rel`·max|λ|, ascending.
    pub fn positive(&self, rel: f64) -> Vec<f64> {
        let tol = rel * self.max_abs();
        self.lambdas
            .iter()
            .filter(|z| z.re > tol)
            .map(|z| z.re)
            .collect()
    }

    /// The `n` largest real parts, ascending.
    pub fn top_real(&self, n: usize) -> Vec<f64> {
        let m = self.lambdas.len();
        self.lambdas[m - n.min(m)..].iter().map(|z| z.re).collect()
    }
}

/// The complex plane-wave matrix C + (i/k)S.
pub fn plane_wave_matrix(sys: &LinearSystem, k: f64) -> DMatrix<Complex64> {
    DMatrix::from_fn(sys.c.nrows(), sys.c.ncols(), |r, c| {
        Complex64::new(sys.c[(r, c)], sys.s[(r, c)] / k)
    })
}

pub fn dispersion_at_k(sys: &LinearSystem, k: f64) -> Result<EigenSolveResult> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::Domain(format!("wave number must be positive, got {k}")));
    }
    let mut lambdas = complex_eigenvalues(&plane_wave_matrix(sys, k))?;
    lambdas.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let max_imag = lambdas.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    Ok(EigenSolveResult {
        k,
        lambdas,
        max_imag,
    })
}
