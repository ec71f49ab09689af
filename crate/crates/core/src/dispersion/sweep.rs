use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed_form::{cutoffs, CutoffSet};
use super::solve::{dispersion_at_k, EigenSolveResult};
use crate::error::{Error, Result};
use crate::linearize::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModeClass {
    Rotational,
    Longitudinal,
    Shear,
    Zero,
    Unclassified,
}

impl fmt::Display for ModeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModeClass::Rotational => "rotational",
            ModeClass::Longitudinal => "longitudinal",
            ModeClass::Shear => "shear",
            ModeClass::Zero => "zero",
            ModeClass::Unclassified => "unclassified",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Acoustic,
    Optical,
    /// Non-propagating (λ = 0) modes.
    Static,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Acoustic => "acoustic",
            Kind::Optical => "optical",
            Kind::Static => "static",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub k: f64,
    pub omega: f64,
    pub v_phase: f64,
    pub v_group: f64,
}

/// One dispersion curve ω(k), possibly standing for several coincident
/// eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub id: usize,
    pub mode_class: ModeClass,
    pub kind: Kind,
    /// Number of eigenvalues (per sign) sharing this curve.
    pub multiplicity: usize,
    pub samples: Vec<Sample>,
    /// Set when the k → 0 or k → ∞ limit matched more than one candidate.
    pub unresolved: bool,
    /// Richardson estimate of ω(k → 0).
    pub cutoff_estimate: f64,
    /// Richardson estimate of λ(k → ∞).
    pub speed_limit_estimate: f64,
}

impl Branch {
    pub fn omega_range(&self) -> (f64, f64) {
        self.samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s.omega), hi.max(s.omega))
            })
    }
}

/// K-grid description; the default is 400 log-spaced points on [0.1, 1e4].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub points: usize,
}

impl Default for KGrid {
    fn default() -> Self {
        Self {
            k_min: 0.1,
            k_max: 1e4,
            points: 400,
        }
    }
}

impl KGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.k_min > 0.0 && self.k_max > self.k_min && self.points >= 3) {
            return Err(Error::Config(format!(
                "k grid needs 0 < k_min < k_max and at least 3 points, got {self:?}"
            )));
        }
        let (a, b) = (self.k_min.ln(), self.k_max.ln());
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| match i {
                0 => self.k_min,
                i if i == n => self.k_max,
                i => (a + (b - a) * i as f64 / n as f64).exp(),
            })
            .collect())
    }
}

/// Full sweep output: branches plus the raw solves they came from.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub branches: Vec<Branch>,
    pub solves: Vec<EigenSolveResult>,
    pub cutoffs: CutoffSet,
}

/// Solve at every k (in parallel; the result is ordered by k) and build
/// branches.
pub fn sweep(sys: &LinearSystem, k_grid: &[f64]) -> Result<SweepResult> {
    if k_grid.len() < 3 || k_grid.windows(2).any(|w| !(w[1] > w[0])) || k_grid[0] <= 0.0 {
        return Err(Error::Config(
            "k grid must be positive, strictly increasing, with at least 3 points".into(),
        ));
    }
    let solves: Vec<EigenSolveResult> = k_grid
        .par_iter()
        .map(|&k| dispersion_at_k(sys, k))
        .collect::<Result<_>>()?;
    let cut = cutoffs(&sys.params);
    let branches = build_branches(&solves, &cut, sys.params.max_char_speed());
    Ok(SweepResult {
        branches,
        solves,
        cutoffs: cut,
    })
}

/// Relative size below which an eigenvalue counts as zero.
pub const ZERO_TOL: f64 = 1e-7;

const DEGENERATE_TOL: f64 = 1e-7;

fn coincide(x: f64, y: f64) -> bool {
    (x - y).abs() <= DEGENERATE_TOL * x.abs().max(y.abs()).max(1e-300)
}

/// Groups indices of `vals` whose values coincide (transitively, in sorted order).
fn clusters(vals: &[f64]) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in idx {
        match out.last_mut() {
            Some(c) if coincide(vals[*c.last().unwrap()], vals[i]) => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

/// Assigns tracks to the next column of values. Tracks that were degenerate
/// at the previous k stay together and only match a value cluster of the
/// same size; when the cluster sizes change the plain assignment is used.
fn assign_clustered(pred: &[f64], prev: &[f64], next: &[f64]) -> Vec<usize> {
    let plain = |pred: &[f64]| {
        let cost: Vec<Vec<f64>> = pred
            .iter()
            .map(|p| next.iter().map(|w| (w - p).abs()).collect())
            .collect();
        hungarian(&cost)
    };
    let tc = clusters(prev);
    let vc = clusters(next);
    let mut ts: Vec<usize> = tc.iter().map(Vec::len).collect();
    let mut vs: Vec<usize> = vc.iter().map(Vec::len).collect();
    ts.sort_unstable();
    vs.sort_unstable();
    if ts != vs || tc.len() == pred.len() {
        return plain(pred);
    }
    let cost: Vec<Vec<f64>> = tc
        .iter()
        .map(|c| {
            let p = c.iter().map(|&t| pred[t]).sum::<f64>() / c.len() as f64;
            vc.iter()
                .map(|v| {
                    if v.len() == c.len() {
                        (next[v[0]] - p).abs()
                    } else {
                        1e300
                    }
                })
                .collect()
        })
        .collect();
    let cl = hungarian(&cost);
    let mut assign = vec![0; pred.len()];
    for (ci, &vi) in cl.iter().enumerate() {
        for (&t, &m) in tc[ci].iter().zip(&vc[vi]) {
            assign[t] = m;
        }
    }
    assign
}

fn build_branches(solves: &[EigenSolveResult], cut: &CutoffSet, max_speed: f64) -> Vec<Branch> {
    let n_dim = solves[0].lambdas.len();
    // The number of positive roots is the most frequent count over k; a
    // single noisy sample must not add a track.
    let mut counts = vec![0usize; n_dim + 1];
    for s in solves {
        counts[s.positive(ZERO_TOL).len()] += 1;
    }
    let n_track = (0..=n_dim).max_by_key(|&c| counts[c]).unwrap_or(0);
    let ks: Vec<f64> = solves.iter().map(|s| s.k).collect();
    let omegas: Vec<Vec<f64>> = solves
        .iter()
        .map(|s| s.top_real(n_track).iter().map(|l| l * s.k).collect())
        .collect();

    // tracks[t][j] = ω of track t at ks[j]
    let mut tracks: Vec<Vec<f64>> = (0..n_track).map(|t| vec![omegas[0][t]]).collect();
    for j in 1..ks.len() {
        let pred: Vec<f64> = tracks
            .iter()
            .map(|tr| {
                if j >= 2 {
                    let slope = (tr[j - 1] - tr[j - 2]) / (ks[j - 1] - ks[j - 2]);
                    tr[j - 1] + slope * (ks[j] - ks[j - 1])
                } else {
                    tr[j - 1]
                }
            })
            .collect();
        let prev: Vec<f64> = tracks.iter().map(|tr| tr[j - 1]).collect();
        let assign = assign_clustered(&pred, &prev, &omegas[j]);
        for (t, &m) in assign.iter().enumerate() {
            tracks[t].push(omegas[j][m]);
        }
    }

    // Merge tracks that coincide everywhere (degenerate polarizations).
    let mut group: Vec<usize> = (0..n_track).collect();
    for a in 0..n_track {
        if group[a] != a {
            continue;
        }
        for b in (a + 1)..n_track {
            if group[b] == b
                && tracks[a]
                    .iter()
                    .zip(&tracks[b])
                    .all(|(x, y)| coincide(*x, *y))
            {
                group[b] = a;
            }
        }
    }

    let mut branches = Vec::new();
    for a in 0..n_track {
        if group[a] != a {
            continue;
        }
        let mult = group.iter().filter(|&&g| g == a).count();
        // Average the members to suppress solver noise.
        let members: Vec<&Vec<f64>> = (0..n_track)
            .filter(|&t| group[t] == a)
            .map(|t| &tracks[t])
            .collect();
        let omega: Vec<f64> = (0..ks.len())
            .map(|j| members.iter().map(|m| m[j]).sum::<f64>() / mult as f64)
            .collect();
        branches.push(make_branch(&ks, &omega, mult, cut, max_speed));
    }
    branches.sort_by(|x, y| x.samples[0].omega.total_cmp(&y.samples[0].omega));
    let zero_mult = n_dim - 2 * n_track;
    if zero_mult > 0 {
        branches.push(Branch {
            id: 0,
            mode_class: ModeClass::Zero,
            kind: Kind::Static,
            multiplicity: zero_mult,
            samples: ks
                .iter()
                .map(|&k| Sample {
                    k,
                    omega: 0.0,
                    v_phase: 0.0,
                    v_group: 0.0,
                })
                .collect(),
            unresolved: false,
            cutoff_estimate: 0.0,
            speed_limit_estimate: 0.0,
        });
    }
    for (i, b) in branches.iter_mut().enumerate() {
        b.id = i;
    }
    branches
}

fn make_branch(ks: &[f64], omega: &[f64], mult: usize, cut: &CutoffSet, max_speed: f64) -> Branch {
    let n = ks.len();
    let vg = group_velocity(ks, omega);
    let samples: Vec<Sample> = (0..n)
        .map(|j| Sample {
            k: ks[j],
            omega: omega[j],
            v_phase: omega[j] / ks[j],
            v_group: vg[j],
        })
        .collect();
    // ω² ≈ ω_c² + a k² near k = 0 and ω² ≈ λ∞² k² + b for large k.
    let (k1, k2) = (ks[0], ks[1]);
    let wc2 = (k2 * k2 * omega[0].powi(2) - k1 * k1 * omega[1].powi(2)) / (k2 * k2 - k1 * k1);
    let cutoff_estimate = wc2.max(0.0).sqrt();
    let (ka, kb) = (ks[n - 2], ks[n - 1]);
    let l2 = (omega[n - 1].powi(2) - omega[n - 2].powi(2)) / (kb * kb - ka * ka);
    let speed_limit_estimate = l2.max(0.0).sqrt();

    let kind = if omega[0] / ks[0] <= 1.5 * max_speed {
        Kind::Acoustic
    } else {
        Kind::Optical
    };
    let (mode_class, unresolved) = classify(kind, mult, cutoff_estimate, speed_limit_estimate, cut);
    Branch {
        id: 0,
        mode_class,
        kind,
        multiplicity: mult,
        samples,
        unresolved,
        cutoff_estimate,
        speed_limit_estimate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cut {
    Zero,
    Rot,
    Shear,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Speed {
    Long,
    Shear,
    Rot,
}

/// Index of the single candidate within `tol` (relative), or `Err` if
/// several match.
fn match_one<T: Copy>(x: f64, cands: &[(Option<f64>, T)], tol: f64) -> std::result::Result<Option<T>, ()> {
    let hits: Vec<T> = cands
        .iter()
        .filter_map(|&(c, t)| c.filter(|c| (x - c).abs() <= tol * c.abs()).map(|_| t))
        .collect();
    match hits.len() {
        0 => Ok(None),
        1 => Ok(Some(hits[0])),
        _ => Err(()),
    }
}

const LIMIT_TOL: f64 = 1e-3;

fn classify(kind: Kind, mult: usize, wc: f64, lam: f64, cut: &CutoffSet) -> (ModeClass, bool) {
    let s = match_one(
        lam,
        &[
            (Some(cut.c_l), Speed::Long),
            (Some(cut.c_s), Speed::Shear),
            (Some(cut.c_inf), Speed::Rot),
        ],
        LIMIT_TOL,
    );
    let by_speed = |s: Option<Speed>| match (s, mult) {
        (Some(Speed::Long), 1) => Some(ModeClass::Longitudinal),
        (Some(Speed::Shear), 2) => Some(ModeClass::Shear),
        _ => None,
    };
    if kind == Kind::Acoustic {
        let class = match (s, mult) {
            (Ok(Some(Speed::Rot)), 1) => ModeClass::Rotational,
            (Ok(Some(Speed::Rot)), 2) => ModeClass::Shear,
            (Ok(sp), _) if by_speed(sp).is_some() => by_speed(sp).unwrap(),
            (_, 1) => ModeClass::Longitudinal,
            (_, 2) => ModeClass::Shear,
            _ => ModeClass::Unclassified,
        };
        return (class, false);
    }
    let c = match_one(
        wc,
        &[
            (cut.omega0, Cut::Rot),
            (cut.omega_s, Cut::Shear),
            (cut.omega_l, Cut::Long),
            (Some(0.0), Cut::Zero),
        ],
        LIMIT_TOL,
    );
    let Ok(s) = s else {
        return (ModeClass::Unclassified, true);
    };
    let Ok(c) = c else {
        // Coincident cutoffs: only the speed can decide.
        return match by_speed(s) {
            Some(class) => (class, false),
            None => (ModeClass::Unclassified, true),
        };
    };
    let class = match (c, s, mult) {
        (Some(Cut::Rot), Some(Speed::Rot), 1) => ModeClass::Rotational,
        (Some(Cut::Rot), Some(Speed::Rot), 2) => ModeClass::Shear,
        (Some(Cut::Shear), Some(Speed::Rot), 2) => ModeClass::Rotational,
        (Some(Cut::Shear), Some(Speed::Shear), 2) => ModeClass::Shear,
        (Some(Cut::Shear), Some(Speed::Rot), 1) => ModeClass::Longitudinal,
        (Some(Cut::Long), Some(Speed::Long), 1) => ModeClass::Longitudinal,
        _ => by_speed(s).unwrap_or(ModeClass::Unclassified),
    };
    (class, false)
}

/// dω/dk by three-point differences on a non-uniform grid, one-sided at
/// the ends.
pub fn group_velocity(k: &[f64], omega: &[f64]) -> Vec<f64> {
    let n = k.len();
    assert!(n >= 3 && omega.len() == n);
    let mut out = vec![0.0; n];
    for j in 1..n - 1 {
        let h1 = k[j] - k[j - 1];
        let h2 = k[j + 1] - k[j];
        out[j] = -h2 / (h1 * (h1 + h2)) * omega[j - 1]
            + (h2 - h1) / (h1 * h2) * omega[j]
            + h1 / (h2 * (h1 + h2)) * omega[j + 1];
    }
    let (h1, h2) = (k[1] - k[0], k[2] - k[1]);
    out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * omega[0] + (h1 + h2) / (h1 * h2) * omega[1]
        - h1 / (h2 * (h1 + h2)) * omega[2];
    let (h1, h2) = (k[n - 2] - k[n - 3], k[n - 1] - k[n - 2]);
    out[n - 1] = h2 / (h1 * (h1 + h2)) * omega[n - 3] - (h1 + h2) / (h1 * h2) * omega[n - 2]
        + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * omega[n - 1];
    out
}

/// Minimum-cost perfect matching on a square cost matrix. Returns, for
/// each row, the assigned column.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return vec![];
    }
    // Potentials formulation, 1-based with a virtual column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hungarian_small() {
        let c = vec![
            vec![4.0, 1.0, 3.0],
            vec![2.0, 0.0, 5.0],
            vec![3.0, 2.0, 2.0],
        ];
        let a = hungarian(&c);
        let total: f64 = a.iter().enumerate().map(|(r, &col)| c[r][col]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn group_velocity_exact_for_quadratics() {
        let k = [0.1, 0.3, 0.35, 0.9, 1.4];
        let w: Vec<f64> = k.iter().map(|x| 2.0 * x * x + 3.0 * x + 1.0).collect();
        let g = group_velocity(&k, &w);
        for (x, gv) in k.iter().zip(g) {
            assert!((gv - (4.0 * x + 3.0)).abs() < 1e-12, "{x}: {gv}");
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = KGrid::default().values().unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[399], 1e4);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
