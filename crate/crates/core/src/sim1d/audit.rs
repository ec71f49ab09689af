use std::io::Write;

use super::Simulation;
use crate::equilibrium::equilibrium_state;
use crate::error::{Error, Result};
use crate::model::{field_names, PointState};
use crate::output::fmt_num;

/// Domain integrals, summed cell by cell in index order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    /// ∫ energy dx (J/m², per unit cross-section).
    pub energy: f64,
    /// ∫ M dx.
    pub momentum: [f64; 3],
    /// ∫ |M| dx, the scale for relative momentum errors.
    pub momentum_scale: f64,
}

impl Simulation {
    pub fn totals(&self) -> Result<Totals> {
        let dx = self.grid.dx();
        let mut energy = 0.0;
        let mut momentum = [0.0; 3];
        let mut scale = 0.0;
        for (i, q) in self.cells.iter().enumerate() {
            let e = self
                .model
                .potential(&PointState::from_fields(q))
                .map_err(|e| super::abort(i, self.time, e))?;
            energy += e * dx;
            for c in 0..3 {
                momentum[c] += q[c] * dx;
                scale += q[c].abs() * dx;
            }
        }
        Ok(Totals {
            energy,
            momentum,
            momentum_scale: scale,
        })
    }

    /// Energy of the uniform state at rest over the same domain.
    pub fn rest_energy(&self) -> Result<f64> {
        let e = self.model.potential(&equilibrium_state(self.model.params()))?;
        Ok(e * self.grid.dx() * self.grid.n as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAudit {
    pub times: Vec<f64>,
    pub total_energy: Vec<f64>,
    pub total_momentum: Vec<[f64; 3]>,
    /// (E(t_end) − E(0)) / |E(0)|.
    pub drift: f64,
    /// Largest |E(t) − E(0)| / |E(0)| over the output times.
    pub max_drift: f64,
    /// Energy change relative to the initial energy above the state at
    /// rest; `None` when the data is the state at rest.
    pub perturbation_drift: Option<f64>,
    /// Largest |∫M(t) − ∫M(0)| / ∫|M(0)| over the output times.
    pub momentum_drift: f64,
}

/// Runs `sim` through `output_times` (increasing, after the current time)
/// and records domain totals at the start and at every output time.
pub fn energy_audit(sim: &mut Simulation, output_times: &[f64]) -> Result<EnergyAudit> {
    if output_times.windows(2).any(|w| !(w[1] > w[0]))
        || output_times.first().is_some_and(|&t| t < sim.time())
    {
        return Err(Error::Config("output times must increase from the current time".into()));
    }
    let rest = sim.rest_energy()?;
    let first = sim.totals()?;
    let mut times = vec![sim.time()];
    let mut energy = vec![first.energy];
    let mut momentum = vec![first.momentum];
    for &t in output_times {
        sim.advance_to(t)?;
        let tot = sim.totals()?;
        times.push(sim.time());
        energy.push(tot.energy);
        momentum.push(tot.momentum);
    }
    let e0 = first.energy;
    let rel = |d: f64, scale: f64| if d == 0.0 { 0.0 } else { d / scale.abs() };
    let last = *energy.last().unwrap_or(&e0);
    let max_drift = energy
        .iter()
        .map(|e| rel(e - e0, e0).abs())
        .fold(0.0, f64::max);
    let perturbation = e0 - rest;
    let momentum_drift = momentum
        .iter()
        .map(|m| {
            let d = (0..3).map(|c| (m[c] - first.momentum[c]).abs()).fold(0.0, f64::max);
            rel(d, first.momentum_scale)
        })
        .fold(0.0, f64::max);
    Ok(EnergyAudit {
        drift: rel(last - e0, e0),
        max_drift,
        perturbation_drift: (perturbation != 0.0).then(|| (last - e0) / perturbation.abs()),
        momentum_drift,
        times,
        total_energy: energy,
        total_momentum: momentum,
    })
}

/// Time series: time, total energy and momentum components.
pub fn write_series_csv(audit: &EnergyAudit, header: &str, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{header}")?;
    writeln!(out, "time,total_energy,momentum_1,momentum_2,momentum_3")?;
    for ((t, e), m) in audit.times.iter().zip(&audit.total_energy).zip(&audit.total_momentum) {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(*t),
            fmt_num(*e),
            fmt_num(m[0]),
            fmt_num(m[1]),
            fmt_num(m[2])
        )?;
    }
    Ok(())
}

/// One row per cell: x and the 39 conservative fields.
pub fn write_snapshot_csv(sim: &Simulation, header: &str, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{header}")?;
    writeln!(out, "# time={}", fmt_num(sim.time()))?;
    writeln!(out, "x,{}", field_names("M").join(","))?;
    for (i, q) in sim.cells().iter().enumerate() {
        let row: Vec<String> = q.iter().map(|&x| fmt_num(x)).collect();
        writeln!(out, "{},{}", fmt_num(sim.grid().center(i)), row.join(","))?;
    }
    Ok(())
}
