//! Numerical laboratory for a torsion-based continuum model of
//! microstructured elastic solids.
//!
//! * [`model`] evaluates energy, forces, stress and sources at one point.
//! * [`equilibrium`] builds the reference state and checks convexity.
//! * [`linearize`] assembles the one-dimensional linear system about rest.
//! * [`dispersion`] solves the plane-wave problem and finds band gaps.
//! * [`sim1d`] is a periodic finite-volume solver for the nonlinear system.
//! * [`config`] and [`output`] serve the command-line tool.

pub mod checks;
pub mod config;
pub mod dispersion;
pub mod eigen;
pub mod equilibrium;
pub mod error;
pub mod linearize;
pub mod model;
pub mod output;
pub mod params;
pub mod sim1d;
pub mod svg;
pub mod tensor;

pub use error::{Error, Result};
pub use params::{MaterialParams, Relaxation};
