//! Material constants of the microstructured solid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A relaxation parameter (inverse length). `Infinite` switches the
/// corresponding source terms off entirely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relaxation {
    Finite(f64),
    Infinite,
}

impl Relaxation {
    /// `Some(1/x)` for a finite value, `None` when the terms are removed.
    #[inline]
    pub fn reciprocal(self) -> Option<f64> {
        match self {
            Relaxation::Finite(x) => Some(1.0 / x),
            Relaxation::Infinite => None,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Relaxation::Finite(x) => Some(x),
            Relaxation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Relaxation::Infinite)
    }
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relaxation::Finite(x) => write!(f, "{x}"),
            Relaxation::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Relaxation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
            return Ok(Relaxation::Infinite);
        }
        let x: f64 = t
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse relaxation value `{s}`")))?;
        if x.is_infinite() && x > 0.0 {
            Ok(Relaxation::Infinite)
        } else {
            Ok(Relaxation::Finite(x))
        }
    }
}

impl Serialize for Relaxation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Relaxation::Finite(x) => s.serialize_f64(*x),
            Relaxation::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Relaxation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) if x.is_infinite() && x > 0.0 => Ok(Relaxation::Infinite),
            Raw::Num(x) => Ok(Relaxation::Finite(x)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// The physical constants of the model.
///
/// Macroscopic quantities (bulk material) use the `_macro` suffix, the
/// microstructure uses `_micro`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialParams {
    /// Reference mass density (kg/m³).
    pub rho0: f64,
    /// Macroscopic bulk sound speed C₀ (m/s).
    pub c0_macro: f64,
    /// Macroscopic shear sound speed C_s (m/s).
    pub cs_macro: f64,
    /// Microscopic bulk sound speed c₀ (m/s).
    pub c0_micro: f64,
    /// Microscopic shear sound speed c_s (m/s).
    pub cs_micro: f64,
    /// Macroscopic adiabatic index Γ.
    pub gamma_macro: f64,
    /// Microscopic adiabatic index γ.
    pub gamma_micro: f64,
    /// Torsion transport parameter ε (kg·m).
    pub epsilon: f64,
    /// Torsion transport parameter μ (s²/(m³·kg)).
    pub mu: f64,
    /// Relaxation parameter α (1/m) of the macro-distortion exchange.
    pub alpha: Relaxation,
    /// Relaxation parameter β (1/m) of the micro-distortion exchange.
    pub beta: Relaxation,
    /// Microstructure length (m). Informational only.
    pub ell: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl MaterialParams {
    /// Reference parameter set for a soft microstructure in a stiff matrix.
    /// Both adiabatic indices are 3 and both relaxation parameters are
    /// 100 1/m (not 1/ℓ).
    pub fn reference() -> Self {
        Self {
            rho0: 2000.0,
            c0_macro: 600.0,
            cs_macro: 600.0,
            c0_micro: 100.0,
            cs_micro: 100.0,
            gamma_macro: 3.0,
            gamma_micro: 3.0,
            epsilon: 2e-5,
            mu: 5e-1,
            alpha: Relaxation::Finite(100.0),
            beta: Relaxation::Finite(100.0),
            ell: 2e-3,
        }
    }

    /// Speed of the rotational modes at short wavelengths, 1/√(εμ).
    pub fn c_inf(&self) -> f64 {
        1.0 / (self.epsilon * self.mu).sqrt()
    }

    /// Macroscopic longitudinal speed √(C₀² + 4/3 C_s²).
    pub fn c_long(&self) -> f64 {
        (self.c0_macro.powi(2) + 4.0 / 3.0 * self.cs_macro.powi(2)).sqrt()
    }

    /// Largest characteristic speed of the homogeneous (source-free) system.
    pub fn max_char_speed(&self) -> f64 {
        self.c_long().max(self.cs_macro).max(self.c_inf())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rho0", self.rho0),
            ("c0_macro", self.c0_macro),
            ("cs_macro", self.cs_macro),
            ("c0_micro", self.c0_micro),
            ("cs_micro", self.cs_micro),
            ("epsilon", self.epsilon),
            ("mu", self.mu),
        ];
        for (name, x) in positive {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidParams {
                    name,
                    reason: format!("must be finite and strictly positive, got {x}"),
                });
            }
        }
        for (name, g) in [
            ("gamma_macro", self.gamma_macro),
            ("gamma_micro", self.gamma_micro),
        ] {
            if !(g.is_finite() && g > 1.0) {
                return Err(Error::InvalidParams {
                    name,
                    reason: format!("adiabatic index must exceed 1, got {g}"),
                });
            }
        }
        for (name, r) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Relaxation::Finite(x) = r {
                if !(x.is_finite() && x > 0.0) {
                    return Err(Error::InvalidParams {
                        name,
                        reason: format!("must be positive or `inf`, got {x}"),
                    });
                }
            }
        }
        let c = self.c_inf();
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParams {
                name: "epsilon",
                reason: "1/sqrt(epsilon*mu) is not finite".into(),
            });
        }
        Ok(())
    }

    /// Builder-style overrides used by tests and the parameter sweeps.
    pub fn with_alpha(mut self, alpha: Relaxation) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: Relaxation) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_adiabatic(mut self, gamma_macro: f64, gamma_micro: f64) -> Self {
        self.gamma_macro = gamma_macro;
        self.gamma_micro = gamma_micro;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_speeds() {
        let p = MaterialParams::reference();
        assert!((p.c_long() - 916.515).abs() < 1e-3);
        assert!((p.c_inf() - 316.227_766).abs() < 1e-5);
        p.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut p = MaterialParams::reference();
        p.mu = 0.0;
        assert!(p.validate().is_err());
        let p = MaterialParams::reference().with_adiabatic(1.0, 2.0);
        assert!(p.validate().is_err());
        let p = MaterialParams::reference().with_alpha(Relaxation::Finite(-1.0));
        assert!(p.validate().is_err());
    }

    #[test]
    fn relaxation_parsing() {
        assert_eq!("inf".parse::<Relaxation>().unwrap(), Relaxation::Infinite);
        assert_eq!(
            "33.18".parse::<Relaxation>().unwrap(),
            Relaxation::Finite(33.18)
        );
        assert!("abc".parse::<Relaxation>().is_err());
        assert_eq!(Relaxation::Infinite.reciprocal(), None);
        assert_eq!(Relaxation::Finite(4.0).reciprocal(), Some(0.25));
    }
}
