//! One-dimensional linear system about the reference state:
//! ∂w/∂t + C ∂w/∂x = S w, with w the primitive fields.

use std::io::Write;

use nalgebra::DMatrix;

use crate::equilibrium::{equilibrium_state, BaselineMode};
use crate::error::{Error, Result};
use crate::model::{
    field_names, nonconservative_x, FieldVec, Model, PointState, NFIELDS, OFF_DISTORTION,
    OFF_MICRO, OFF_TORSION_B, OFF_TORSION_D,
};
use crate::params::MaterialParams;
use crate::tensor::{deviator, levi_civita, Mat3};

/// Flat ordering of the primitive fields {v, A, P, B, D}, row-major per block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldIndexMap {
    names: Vec<String>,
}

impl Default for FieldIndexMap {
    fn default() -> Self {
        Self {
            names: field_names("v"),
        }
    }
}

impl FieldIndexMap {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Index of entry (row, col) of a 3×3 block: 'A', 'P', 'B' or 'D'.
    pub fn block(&self, block: char, row: usize, col: usize) -> usize {
        let off = match block {
            'A' => OFF_DISTORTION,
            'P' => OFF_MICRO,
            'B' => OFF_TORSION_B,
            'D' => OFF_TORSION_D,
            _ => panic!("unknown block {block}"),
        };
        off + 3 * row + col
    }

    /// Comma-separated names, used as a CSV header.
    pub fn header(&self) -> String {
        self.names.join(",")
    }
}

/// Conservative state to primitive vector (M replaced by v).
pub fn to_primitive(model: &Model, state: &PointState) -> Result<FieldVec> {
    let v = model.velocity(state)?;
    let mut w = state.to_fields();
    w[..3].copy_from_slice(v.as_slice());
    Ok(w)
}

pub fn from_primitive(model: &Model, w: &[f64]) -> Result<PointState> {
    let mut s = PointState::from_fields(w);
    let v = crate::tensor::Vec3::new(w[0], w[1], w[2]);
    s.momentum = model.momentum_from_velocity(&v, &s)?;
    Ok(s)
}

fn fd_jacobian<F>(x0: &FieldVec, mut f: F) -> Result<DMatrix<f64>>
where
    F: FnMut(&FieldVec) -> Result<FieldVec>,
{
    let mut jac = DMatrix::zeros(NFIELDS, NFIELDS);
    let mut x = *x0;
    for n in 0..NFIELDS {
        let h = 1e-6 * x0[n].abs().max(1.0);
        x[n] = x0[n] + h;
        let up = f(&x)?;
        x[n] = x0[n] - h;
        let down = f(&x)?;
        x[n] = x0[n];
        for m in 0..NFIELDS {
            jac[(m, n)] = (up[m] - down[m]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// ∂q/∂w by central differences.
pub fn primitive_jacobian(model: &Model, w: &FieldVec) -> Result<DMatrix<f64>> {
    fd_jacobian(w, |x| Ok(from_primitive(model, x)?.to_fields()))
}

/// C and S at the reference state.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    /// Transport matrix (m/s).
    pub c: DMatrix<f64>,
    /// Source Jacobian (1/s).
    pub s: DMatrix<f64>,
    pub params: MaterialParams,
    pub baseline: BaselineMode,
    /// Sources at the reference state in conservative order. Nonzero only
    /// in raw mode; it does not enter S.
    pub residual: FieldVec,
}

impl LinearSystem {
    pub fn new(params: &MaterialParams, baseline: BaselineMode) -> Result<Self> {
        let model = Model::new(*params, baseline)?;
        let residual = model.sources(&equilibrium_state(params))?;
        Ok(Self {
            c: transport_matrix(&model),
            s: source_jacobian(&model)?,
            params: *params,
            baseline,
            residual,
        })
    }

    /// Largest |R(w0)| entry.
    pub fn residual_norm(&self) -> f64 {
        self.residual.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }

    /// Row-major CSV with 17 significant digits and a header of field names.
    pub fn write_csv(matrix: &DMatrix<f64>, out: &mut impl Write) -> Result<()> {
        writeln!(out, "row,{}", FieldIndexMap::default().header())?;
        let names = FieldIndexMap::default();
        for r in 0..matrix.nrows() {
            write!(out, "{}", names.names()[r])?;
            for c in 0..matrix.ncols() {
                write!(out, ",{}", crate::output::fmt_num(matrix[(r, c)]))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Stress variation δΣ (row x¹) for distortion increments a, b at rest.
fn stress_row_variation(model: &Model, a: &Mat3, b: &Mat3) -> [f64; 3] {
    let p = model.params();
    let ct = model.counterterms();
    let (gm, gu) = (p.gamma_macro, p.gamma_micro);
    let e1 = p.rho0 * p.c0_macro.powi(2) / (gm * (gm - 1.0));
    let e3 = p.rho0 * p.c0_micro.powi(2) / (gu * (gu - 1.0));
    let h0 = p.rho0 * p.c0_micro.powi(2) / gu;
    let f0 = gm * e1 + e3;
    let (ta, tb) = (a.trace(), b.trace());
    let id = Mat3::identity();
    let mut d_macro = id * ((gm * gm * e1 + e3) * ta + (gu - 1.0) * e3 * tb) - a.transpose() * f0
        + deviator(&(a + a.transpose())) * (p.rho0 * p.cs_macro.powi(2));
    d_macro += -(id * ta - a.transpose()) * ct.k_macro - id * (ct.k_micro * tb);
    let macro0 = f0 - ct.k_macro;
    let micro0 = h0 - ct.k_micro;
    // Σ = −p I − Πᵀ A + …; at rest δp = −(Π₀ tr a + π₀ tr b).
    let d_sigma = id * (macro0 * ta + micro0 * tb) - d_macro.transpose() - a * macro0;
    [d_sigma[(0, 0)], d_sigma[(0, 1)], d_sigma[(0, 2)]]
}

/// Analytic transport matrix along x¹ in primitive variables.
pub fn transport_matrix(model: &Model) -> DMatrix<f64> {
    let p = model.params();
    let mut c = DMatrix::zeros(NFIELDS, NFIELDS);
    for n in 0..9 {
        let mut unit = Mat3::zeros();
        unit[(n / 3, n % 3)] = 1.0;
        let da = stress_row_variation(model, &unit, &Mat3::zeros());
        let db = stress_row_variation(model, &Mat3::zeros(), &unit);
        for i in 0..3 {
            c[(i, OFF_DISTORTION + n)] = -da[i] / p.rho0;
            c[(i, OFF_MICRO + n)] = -db[i] / p.rho0;
        }
    }
    for a in 0..3 {
        c[(OFF_DISTORTION + 3 * a, a)] = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                let e = levi_civita(i, 0, j);
                if e != 0.0 {
                    c[(OFF_TORSION_D + 3 * a + i, OFF_TORSION_B + 3 * a + j)] = -e / p.mu;
                    c[(OFF_TORSION_B + 3 * a + i, OFF_TORSION_D + 3 * a + j)] = e / p.epsilon;
                }
            }
        }
    }
    c
}

/// Transport matrix from differences of the nonlinear flux plus the
/// non-conservative products: C = 𝔸⁻¹(∂F/∂w + N).
pub fn transport_matrix_fd(model: &Model) -> Result<DMatrix<f64>> {
    let w0 = to_primitive(model, &equilibrium_state(model.params()))?;
    let aq = primitive_jacobian(model, &w0)?;
    let jf = fd_jacobian(&w0, |w| Ok(model.flux_x(&from_primitive(model, w)?)?.flux))?;
    let s0 = from_primitive(model, &w0)?;
    let v0 = model.velocity(&s0)?;
    let mut n = DMatrix::zeros(NFIELDS, NFIELDS);
    for col in 0..NFIELDS {
        let mut g = [0.0; NFIELDS];
        g[col] = 1.0;
        let r = nonconservative_x(&v0, &s0, &g);
        for row in 0..NFIELDS {
            n[(row, col)] = r[row];
        }
    }
    solve(&aq, &(jf + n))
}

/// S = 𝔸⁻¹ ∂R/∂w by central differences of the sources.
pub fn source_jacobian(model: &Model) -> Result<DMatrix<f64>> {
    let w0 = to_primitive(model, &equilibrium_state(model.params()))?;
    let aq = primitive_jacobian(model, &w0)?;
    let jr = fd_jacobian(&w0, |w| model.sources(&from_primitive(model, w)?))?;
    solve(&aq, &jr)
}

fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Domain("singular primitive Jacobian".into()))
}
