use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Grid1D, Reconstruction, SimConfig, Simulation, SourceScheme};
use crate::dispersion::{cutoffs, dispersion_at_k, plane_wave_matrix, ZERO_TOL};
use crate::eigen::eigenvector;
use crate::equilibrium::{equilibrium_state, BaselineMode};
use crate::error::{Error, Result};
use crate::linearize::{from_primitive, to_primitive, FieldIndexMap, LinearSystem};
use crate::model::{FieldVec, Model, PointState, OFF_MICRO};
use crate::params::MaterialParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeBranch {
    #[default]
    ShearAcoustic,
    LongitudinalAcoustic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub branch: ProbeBranch,
    /// Wave number (1/m).
    pub k: f64,
    pub n: usize,
    /// Whole wavelengths in the periodic domain.
    pub wavelengths: usize,
    /// Infinity norm of the initial perturbation of the primitive fields.
    pub amplitude: f64,
    /// Run length in periods of the predicted mode.
    pub periods: f64,
    /// Phase samples per run.
    pub samples: usize,
    pub sim: SimConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            branch: ProbeBranch::ShearAcoustic,
            k: 1.0,
            n: 2000,
            wavelengths: 1,
            amplitude: 1e-6,
            periods: 0.125,
            samples: 32,
            sim: SimConfig {
                reconstruction: Reconstruction::FirstOrder,
                source_scheme: SourceScheme::MidpointSplit,
                ..SimConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub k: f64,
    /// Phase velocity of the selected eigenvalue of the linearized system.
    pub predicted_speed: f64,
    /// ω/k from the phase drift of the simulated mode.
    pub measured_speed: f64,
    /// |measured − predicted| / predicted.
    pub relative_error: f64,
    /// Name of the primitive field whose phase was tracked.
    pub tracked_field: String,
    /// Final over initial Fourier amplitude of the tracked field.
    pub amplitude_ratio: f64,
    pub eigen_residual: f64,
    pub steps: u64,
    pub times: Vec<f64>,
    pub phases: Vec<f64>,
    /// Fourier amplitude of the tracked field at each sample time.
    pub amplitudes: Vec<f64>,
}

/// Picks the acoustic eigenvalue for `branch` at wave number `k`: among
/// positive roots below the acoustic ceiling ω∞/k, the largest simple root
/// is longitudinal and the largest double root is shear.
fn select_acoustic(sys: &LinearSystem, k: f64, branch: ProbeBranch) -> Result<f64> {
    let res = dispersion_at_k(sys, k)?;
    let ceiling = match cutoffs(&sys.params).omega_inf {
        Some(w) if w > 0.0 => w / k,
        Some(_) => 0.0,
        None => f64::INFINITY,
    };
    let ceiling = if sys.params.alpha.is_infinite() && sys.params.beta.is_infinite() {
        f64::INFINITY
    } else {
        ceiling
    };
    let mut pos: Vec<f64> = res
        .positive(ZERO_TOL)
        .into_iter()
        .filter(|&l| l < ceiling)
        .collect();
    pos.sort_by(f64::total_cmp);
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for l in pos {
        match clusters.last_mut() {
            Some((v, m)) if (l - *v).abs() <= 1e-6 * l => *m += 1,
            _ => clusters.push((l, 1)),
        }
    }
    let want = match branch {
        ProbeBranch::ShearAcoustic => 2,
        ProbeBranch::LongitudinalAcoustic => 1,
    };
    clusters
        .iter()
        .rev()
        .find(|(_, m)| *m == want)
        .map(|(v, _)| *v)
        .ok_or_else(|| Error::Domain(format!("no {branch:?} root at k = {k}")))
}

/// Initializes the real part of a plane-wave eigenmode, runs it and
/// measures its phase velocity from the drift of the Fourier phase (the
/// phase of the cross-correlation with the initial profile).
pub fn plane_wave_probe(
    params: &MaterialParams,
    baseline: BaselineMode,
    cfg: &ProbeConfig,
) -> Result<ProbeResult> {
    if !(cfg.k.is_finite() && cfg.k > 0.0) || cfg.wavelengths == 0 || cfg.samples < 2 {
        return Err(Error::Config(format!("invalid probe settings {cfg:?}")));
    }
    if !(cfg.amplitude > 0.0 && cfg.periods > 0.0) {
        return Err(Error::Config("probe amplitude and periods must be positive".into()));
    }
    let sys = LinearSystem::new(params, baseline)?;
    let k = cfg.k;
    let lambda = select_acoustic(&sys, k, cfg.branch)?;
    let (mut vec, residual) = eigenvector(&plane_wave_matrix(&sys, k), Complex64::new(lambda, 0.0));
    let (jmax, _) = vec
        .iter()
        .enumerate()
        .fold((0, 0.0), |(bj, bv), (j, z)| if z.norm() > bv { (j, z.norm()) } else { (bj, bv) });
    let pivot = vec[jmax];
    vec.iter_mut().for_each(|z| *z /= pivot);

    let model = Model::new(*params, baseline)?;
    let length = cfg.wavelengths as f64 * 2.0 * PI / k;
    let grid = Grid1D::new(cfg.n, length)?;
    let w0 = to_primitive(&model, &equilibrium_state(params))?;
    let cells = (0..grid.n)
        .map(|i| {
            let ph = Complex64::new(0.0, k * grid.center(i)).exp();
            let w: FieldVec =
                std::array::from_fn(|c| w0[c] + cfg.amplitude * (vec[c] * ph).re);
            Ok(from_primitive(&model, &w)?.to_fields())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sim = Simulation::new(model, grid, cfg.sim, cells)?;

    let fourier = |sim: &Simulation| -> Result<Complex64> {
        let mut c = Complex64::new(0.0, 0.0);
        for (i, q) in sim.cells().iter().enumerate() {
            let s = PointState::from_fields(q);
            let w = to_primitive(sim.model(), &s).map_err(|e| super::abort(i, sim.time(), e))?;
            let ph = Complex64::new(0.0, -k * sim.grid().center(i)).exp();
            c += (w[jmax] - w0[jmax]) * ph;
        }
        Ok(c)
    };
    let period = 2.0 * PI / (lambda * k);
    let t_end = cfg.periods * period;
    let c0 = fourier(&sim)?;
    let mut times = vec![0.0];
    let mut phases = vec![c0.arg()];
    let mut amplitudes = vec![c0.norm()];
    let mut last = c0;
    for s in 1..=cfg.samples {
        sim.advance_to(t_end * s as f64 / cfg.samples as f64)?;
        last = fourier(&sim)?;
        let prev = *phases.last().unwrap();
        let mut ph = last.arg();
        while ph - prev > PI {
            ph -= 2.0 * PI;
        }
        while ph - prev < -PI {
            ph += 2.0 * PI;
        }
        times.push(sim.time());
        phases.push(ph);
        amplitudes.push(last.norm());
    }
    let slope = ls_slope(&times, &phases);
    let measured = -slope / k;
    Ok(ProbeResult {
        k,
        predicted_speed: lambda,
        measured_speed: measured,
        relative_error: (measured - lambda).abs() / lambda,
        tracked_field: FieldIndexMap::default().names()[jmax].clone(),
        amplitude_ratio: last.norm() / c0.norm(),
        eigen_residual: residual,
        steps: sim.steps(),
        times,
        phases,
        amplitudes,
    })
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GapForcingConfig {
    /// Forcing frequency (rad/s).
    pub omega: f64,
    pub n: usize,
    pub length: f64,
    /// Velocity scale of the response, relative to C_s.
    pub amplitude: f64,
    /// Gaussian half-width of the body force, in cells.
    pub source_width_cells: f64,
    /// Ramp-up time, in forcing periods.
    pub ramp_periods: f64,
    /// Lock-in window at the end of the run, in forcing periods.
    pub lockin_periods: f64,
    pub total_periods: f64,
    /// Distance from the edge of the source region where the carrier is
    /// measured, in cells.
    pub probe_cells: usize,
    /// Amplitude ratio below which the response counts as evanescent.
    pub threshold: f64,
    pub sim: SimConfig,
}

impl Default for GapForcingConfig {
    fn default() -> Self {
        Self {
            omega: 2.91e4,
            n: 200,
            length: 1.0,
            amplitude: 1e-6,
            source_width_cells: 2.0,
            ramp_periods: 5.0,
            lockin_periods: 10.0,
            total_periods: 40.0,
            probe_cells: 10,
            threshold: 0.01,
            sim: SimConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapForcingResult {
    pub omega: f64,
    /// Lock-in amplitude of M₂ per cell.
    pub profile: Vec<f64>,
    pub x: Vec<f64>,
    pub source_amplitude: f64,
    /// Mean amplitude `probe_cells` beyond the source region, over source
    /// amplitude.
    pub ratio: f64,
    pub evanescent: bool,
}

/// Drives a transverse body force at fixed ω in the middle of the domain
/// and measures how far the response reaches.
pub fn gap_forcing(
    params: &MaterialParams,
    baseline: BaselineMode,
    cfg: &GapForcingConfig,
) -> Result<GapForcingResult> {
    if !(cfg.omega > 0.0 && cfg.total_periods > cfg.ramp_periods + cfg.lockin_periods) {
        return Err(Error::Config(format!("invalid gap forcing settings {cfg:?}")));
    }
    let model = Model::new(*params, baseline)?;
    let grid = Grid1D::new(cfg.n, cfg.length)?;
    let dx = grid.dx();
    let mut sim = Simulation::uniform(model, grid, cfg.sim, &PointState::reference())?;
    let xc = 0.5 * cfg.length;
    let width = cfg.source_width_cells * dx;
    let shape: Vec<f64> = (0..grid.n)
        .map(|i| (-((grid.center(i) - xc) / width).powi(2)).exp())
        .collect();
    let f0 = cfg.amplitude * params.rho0 * params.cs_macro * cfg.omega;
    let period = 2.0 * PI / cfg.omega;
    let t_ramp = cfg.ramp_periods * period;
    let t_end = cfg.total_periods * period;
    let t_lock = t_end - cfg.lockin_periods * period;
    let mut xs = vec![0.0; grid.n];
    let mut ys = vec![0.0; grid.n];
    while sim.time() < t_end {
        let dt = sim.stable_dt()?.min(t_end - sim.time());
        sim.step_dt(dt)?;
        // Impulse over the step, centred in time.
        let tm = sim.time() - 0.5 * dt;
        let ramp = if tm < t_ramp { (0.5 * PI * tm / t_ramp).sin().powi(2) } else { 1.0 };
        let f = f0 * ramp * (cfg.omega * tm).sin() * dt;
        for (q, g) in sim.cells_mut().iter_mut().zip(&shape) {
            q[1] += f * g;
        }
        let t = sim.time();
        if t > t_lock {
            let (s, c) = (cfg.omega * t).sin_cos();
            for (i, q) in sim.cells().iter().enumerate() {
                xs[i] += q[1] * s * dt;
                ys[i] += q[1] * c * dt;
            }
        }
    }
    let window = t_end - t_lock;
    let profile: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(a, b)| 2.0 / window * a.hypot(*b))
        .collect();
    let centre = grid.n / 2;
    let source_amplitude = profile[centre - 1].max(profile[centre]);
    // The source region ends where the Gaussian drops below e⁻⁴.
    let edge = (2.0 * cfg.source_width_cells).ceil() as usize;
    let reach = edge + cfg.probe_cells;
    if reach >= centre {
        return Err(Error::Config("domain too short for the probe distance".into()));
    }
    let far = 0.5 * (profile[centre + reach] + profile[centre - 1 - reach]);
    let ratio = far / source_amplitude;
    Ok(GapForcingResult {
        omega: cfg.omega,
        x: (0..grid.n).map(|i| grid.center(i)).collect(),
        profile,
        source_amplitude,
        ratio,
        evanescent: ratio < cfg.threshold,
    })
}

/// Advects a smooth bump in P₁₁ through a uniform flow with α = β = ∞ and
/// returns the largest deviation from the exact translate, relative to
/// the bump height.
pub fn translation_error(
    params: &MaterialParams,
    n: usize,
    velocity: f64,
    t_end: f64,
    sim_cfg: SimConfig,
) -> Result<f64> {
    let p = params.with_alpha(crate::params::Relaxation::Infinite)
        .with_beta(crate::params::Relaxation::Infinite);
    let model = Model::raw(p)?;
    let grid = Grid1D::new(n, 1.0)?;
    let height = 1e-3;
    let bump = |x: f64| {
        let d = x.rem_euclid(1.0) - 0.5;
        height * (-(d / 0.1).powi(2)).exp()
    };
    let at = |x: f64| -> Result<FieldVec> {
        let mut s = PointState::reference();
        s.micro_distortion[(0, 0)] += bump(x);
        s.momentum = model.momentum_from_velocity(&crate::tensor::Vec3::new(velocity, 0.0, 0.0), &s)?;
        Ok(s.to_fields())
    };
    let cells = (0..n).map(|i| at(grid.center(i))).collect::<Result<Vec<_>>>()?;
    let mut sim = Simulation::new(model, grid, SimConfig { t_end, ..sim_cfg }, cells)?;
    sim.run()?;
    let mut err: f64 = 0.0;
    for (i, q) in sim.cells().iter().enumerate() {
        let exact = 1.0 + bump(grid.center(i) - velocity * sim.time());
        err = err.max((q[OFF_MICRO] - exact).abs());
    }
    Ok(err / height)
}

/// Rest state plus a Gaussian bump of height `amplitude` in one primitive
/// field, centred in the domain; `width` is relative to the domain length.
pub fn gaussian_pulse(
    model: &Model,
    grid: &Grid1D,
    field: &str,
    amplitude: f64,
    width: f64,
) -> Result<Vec<FieldVec>> {
    let j = FieldIndexMap::default()
        .index_of(field)
        .ok_or_else(|| Error::Config(format!("unknown primitive field `{field}`")))?;
    let w0 = to_primitive(model, &equilibrium_state(model.params()))?;
    (0..grid.n)
        .map(|i| {
            let d = (grid.center(i) - 0.5 * grid.length) / (width * grid.length);
            let mut w = w0;
            w[j] += amplitude * (-d * d).exp();
            Ok(from_primitive(model, &w)?.to_fields())
        })
        .collect()
}
