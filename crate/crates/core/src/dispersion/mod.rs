//! Plane-wave analysis of the linear system: eigenvalues of C + (i/k)S,
//! branch tracking, band gaps and the closed-form reference values.

mod closed_form;
mod gaps;
mod report;
mod solve;
mod sweep;

pub use closed_form::{
    cutoffs, cutoffs_equal_relaxation, rotational_roots, CutoffSet, RotationalRoots,
};
pub use gaps::{band_gaps, BandGapReport, Gap, GAP_RESOLUTION};
pub use report::{gap_report_text, write_branches_csv};
pub use solve::{dispersion_at_k, plane_wave_matrix, EigenSolveResult};
pub use sweep::{
    group_velocity, hungarian, sweep, Branch, KGrid, Kind, ModeClass, Sample, SweepResult,
    ZERO_TOL,
};

use crate::equilibrium::BaselineMode;
use crate::error::Result;
use crate::linearize::LinearSystem;
use crate::params::MaterialParams;

/// Linear system, sweep and band gaps for one parameter set.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub system: LinearSystem,
    pub sweep: SweepResult,
    pub gaps: BandGapReport,
}

/// Sweeps `k_grid` and searches [0, highest ω reached] for gaps, refining
/// interior extrema.
pub fn analyze(params: &MaterialParams, baseline: BaselineMode, k_grid: &[f64]) -> Result<Analysis> {
    let system = LinearSystem::new(params, baseline)?;
    let sweep = sweep(&system, k_grid)?;
    let omega_max = sweep
        .branches
        .iter()
        .map(|b| b.omega_range().1)
        .fold(0.0, f64::max);
    let gaps = band_gaps(&sweep.branches, omega_max, Some(&system))?;
    Ok(Analysis { system, sweep, gaps })
}
