//! Run configuration: one TOML document with a section per command.
//!
//! Every key is optional and unknown keys are rejected. The resolved
//! configuration (defaults and command-line overrides applied) is
//! serialized again and hashed, and the hash heads every output file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dispersion::KGrid;
use crate::equilibrium::BaselineMode;
use crate::error::{Error, Result};
use crate::output::config_hash;
use crate::params::{MaterialParams, Relaxation};
use crate::sim1d::{GapForcingConfig, ProbeConfig, SimConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub baseline: BaselineMode,
    pub output_dir: PathBuf,
    /// Seed for every random sample drawn by the checks.
    pub seed: u64,
    pub params: MaterialParams,
    pub dispersion: DispersionSection,
    pub sweep_beta: SweepBetaSection,
    pub checks: ChecksSection,
    pub simulate: SimulateSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            baseline: BaselineMode::default(),
            output_dir: PathBuf::from("out"),
            seed: 20240601,
            params: MaterialParams::reference(),
            dispersion: DispersionSection::default(),
            sweep_beta: SweepBetaSection::default(),
            checks: ChecksSection::default(),
            simulate: SimulateSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionSection {
    pub k_grid: KGrid,
    /// Also write the three SVG plots.
    pub svg: bool,
}

impl Default for DispersionSection {
    fn default() -> Self {
        Self {
            k_grid: KGrid::default(),
            svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBetaSection {
    /// First β of the sweep (1/m); the sweep runs towards `beta_end`.
    pub beta_start: f64,
    pub beta_end: f64,
    pub points: usize,
    pub k_grid: KGrid,
}

impl Default for SweepBetaSection {
    fn default() -> Self {
        Self {
            beta_start: 100.0,
            beta_end: 33.18,
            points: 20,
            k_grid: KGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSection {
    /// Random admissible states for the pointwise identities.
    pub random_states: usize,
    /// Random parameter sets for the convexity comparison.
    pub param_samples: usize,
    /// Smallest relative margin for a parameter set to count in the
    /// convexity comparison.
    pub convexity_margin: f64,
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self {
            random_states: 1000,
            param_samples: 50,
            convexity_margin: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Uniform state at rest; nothing may change.
    #[default]
    Equilibrium,
    /// Single eigenmode; measured phase velocity.
    PlaneWave,
    /// Time-harmonic body force; reach of the response.
    GapForcing,
    /// Gaussian pulse in one primitive field, with an energy audit.
    Pulse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    /// Primitive field name, e.g. `v2` or `A12`.
    pub field: String,
    pub amplitude: f64,
    /// Gaussian half-width relative to the domain length.
    pub width: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self {
            field: "v2".into(),
            amplitude: 1e-3,
            width: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub scenario: Scenario,
    pub n: usize,
    /// Domain length (m).
    pub length: f64,
    /// Number of audit records between 0 and `sim.t_end`.
    pub outputs: usize,
    /// Write a field dump at the final time.
    pub snapshot: bool,
    pub sim: SimConfig,
    pub pulse: PulseSection,
    pub plane_wave: ProbeConfig,
    pub gap_forcing: GapForcingConfig,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            scenario: Scenario::default(),
            n: 1000,
            length: 1.0,
            outputs: 10,
            snapshot: false,
            sim: SimConfig {
                t_end: 1e-3,
                ..SimConfig::default()
            },
            pulse: PulseSection::default(),
            plane_wave: ProbeConfig::default(),
            gap_forcing: GapForcingConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub alpha: Option<Relaxation>,
    pub beta: Option<Relaxation>,
    pub baseline: Option<BaselineMode>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(a) = o.alpha {
            self.params.alpha = a;
        }
        if let Some(b) = o.beta {
            self.params.beta = b;
        }
        if let Some(b) = o.baseline {
            self.baseline = b;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
    }

    pub fn validate(&self) -> Result<()> {
        // TOML integers are signed.
        if i64::try_from(self.seed).is_err() {
            return Err(Error::Config(format!("seed must be at most {}, got {}", i64::MAX, self.seed)));
        }
        self.params.validate()?;
        self.dispersion.k_grid.values()?;
        self.sweep_beta.k_grid.values()?;
        let sb = &self.sweep_beta;
        if !(sb.beta_start > 0.0 && sb.beta_end > 0.0 && sb.beta_start.is_finite() && sb.beta_end.is_finite())
            || sb.points < 2
        {
            return Err(Error::Config(
                "sweep_beta needs finite positive beta_start, beta_end and at least 2 points".into(),
            ));
        }
        if self.checks.random_states == 0 || self.checks.param_samples == 0 {
            return Err(Error::Config("checks need at least one sample".into()));
        }
        let s = &self.simulate;
        s.sim.validate()?;
        s.plane_wave.sim.validate()?;
        s.gap_forcing.sim.validate()?;
        if s.outputs == 0 {
            return Err(Error::Config("simulate.outputs must be at least 1".into()));
        }
        if !(s.pulse.width > 0.0 && s.pulse.amplitude.is_finite()) {
            return Err(Error::Config("pulse width must be positive".into()));
        }
        Ok(())
    }

    /// Canonical TOML of the resolved configuration.
    pub fn resolved_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hash of the resolved configuration without the output directory,
    /// so the same computation gets the same header wherever it is written.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        Ok(config_hash(&c.resolved_toml()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_reference() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.params, MaterialParams::reference());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
        assert!(RunConfig::from_toml_str("[params]\nrho = 1.0").is_err());
        assert!(RunConfig::from_toml_str("[simulate.sim]\ncfl2 = 0.1").is_err());
    }

    #[test]
    fn infinite_relaxation_round_trips() {
        let c = RunConfig::from_toml_str("[params]\nalpha = \"inf\"\nbeta = 50.0").unwrap();
        assert!(c.params.alpha.is_infinite());
        let back = RunConfig::from_toml_str(&c.resolved_toml().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash().unwrap(), c.hash().unwrap());
    }

    #[test]
    fn output_dir_does_not_change_hash() {
        let mut c = RunConfig::default();
        let h = c.hash().unwrap();
        c.output_dir = PathBuf::from("elsewhere");
        assert_eq!(c.hash().unwrap(), h);
    }

    #[test]
    fn seed_must_fit_toml() {
        let mut c = RunConfig::default();
        c.seed = i64::MAX as u64;
        c.validate().unwrap();
        c.seed += 1;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn overrides_change_hash() {
        let mut c = RunConfig::default();
        let h = c.hash().unwrap();
        c.apply(&Overrides {
            beta: Some(Relaxation::Finite(33.18)),
            ..Overrides::default()
        });
        assert_ne!(c.hash().unwrap(), h);
    }
}
