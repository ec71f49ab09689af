use super::solve::dispersion_at_k;
use super::sweep::{Branch, Kind};
use crate::error::Result;
use crate::linearize::LinearSystem;

/// A frequency interval reached by no branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub low: f64,
    pub high: f64,
    /// False when the width is below the scan resolution.
    pub resolved: bool,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandGapReport {
    /// All intervals found, resolved or not, ascending.
    pub gaps: Vec<Gap>,
    /// True when at least one resolved gap exists.
    pub complete: bool,
    pub omega_max: f64,
}

impl BandGapReport {
    pub fn resolved(&self) -> impl Iterator<Item = &Gap> {
        self.gaps.iter().filter(|g| g.resolved)
    }

    /// Widest gap, resolved or not.
    pub fn widest(&self) -> Option<&Gap> {
        self.gaps.iter().max_by(|a, b| a.width().total_cmp(&b.width()))
    }
}

/// Relative width under which a gap is reported as unresolved.
pub const GAP_RESOLUTION: f64 = 1e-3;

/// Gaps in [0, omega_max] left by the union of the branch ranges.
///
/// Acoustic branches are extended down to ω = 0. When `refine` is given,
/// extrema that fall inside the k range are refined by bisection on k to
/// 1e-4 relative.
pub fn band_gaps(
    branches: &[Branch],
    omega_max: f64,
    refine: Option<&LinearSystem>,
) -> Result<BandGapReport> {
    let mut intervals = Vec::new();
    for b in branches.iter().filter(|b| b.kind != Kind::Static) {
        let (mut lo, mut hi) = b.omega_range();
        if let Some(sys) = refine {
            lo = refine_extremum(sys, b, false)?.unwrap_or(lo);
            hi = refine_extremum(sys, b, true)?.unwrap_or(hi);
        }
        if b.kind == Kind::Acoustic {
            lo = 0.0;
        }
        intervals.push((lo, hi));
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut reach = 0.0_f64;
    for (lo, hi) in intervals {
        if lo > reach && reach < omega_max {
            gaps.push(make_gap(reach, lo.min(omega_max)));
        }
        reach = reach.max(hi);
    }
    if reach < omega_max {
        gaps.push(make_gap(reach, omega_max));
    }
    let complete = gaps.iter().any(|g| g.resolved);
    Ok(BandGapReport {
        gaps,
        complete,
        omega_max,
    })
}

fn make_gap(low: f64, high: f64) -> Gap {
    Gap {
        low,
        high,
        resolved: high - low > GAP_RESOLUTION * high,
    }
}

/// ω at wave number k on the branch through `guess`.
fn omega_near(sys: &LinearSystem, k: f64, guess: f64) -> Result<f64> {
    let r = dispersion_at_k(sys, k)?;
    Ok(r.lambdas
        .iter()
        .map(|z| z.re * k)
        .min_by(|a, b| (a - guess).abs().total_cmp(&(b - guess).abs()))
        .unwrap_or(guess))
}

/// Refines an interior maximum (or minimum) of ω along the branch.
/// Returns `None` when the extremum sits on the end of the k range.
fn refine_extremum(sys: &LinearSystem, b: &Branch, maximum: bool) -> Result<Option<f64>> {
    let s = &b.samples;
    let sign = if maximum { 1.0 } else { -1.0 };
    let (j, _) = s
        .iter()
        .enumerate()
        .max_by(|x, y| (sign * x.1.omega).total_cmp(&(sign * y.1.omega)))
        .expect("branch has samples");
    if j == 0 || j + 1 == s.len() {
        return Ok(None);
    }
    let mut lo = s[j - 1].k;
    let mut hi = s[j + 1].k;
    let mut guess = s[j].omega;
    // Bisection on the sign of the slope dω/dk.
    while hi - lo > 1e-4 * lo {
        let mid = 0.5 * (lo + hi);
        let d = 1e-3 * (hi - lo);
        let up = omega_near(sys, mid + d, guess)?;
        let down = omega_near(sys, mid - d, guess)?;
        guess = 0.5 * (up + down);
        if sign * (up - down) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = omega_near(sys, 0.5 * (lo + hi), guess)?;
    Ok(Some(if maximum {
        best.max(s[j].omega)
    } else {
        best.min(s[j].omega)
    }))
}
