//! Simulation and analysis of a bird/mosquito West Nile virus model with
//! advection and Stefan free boundaries.
//!
//! - [`model`]: parameters, derived coefficients, closed-form risk indices.
//! - [`eigen`]: principal eigenvalue and numerical reproduction number.
//! - [`stefan`]: front-fixed semi-implicit integrator for the moving-boundary system.
//! - [`dynamics`]: vanishing/spreading classification, front speeds, monitors.
//! - [`wavespeed`]: semi-wave profiles and the free-boundary speed `c_nu`.
//! - [`oracle`]: independent reference integrators used for cross-checks.
//! - [`harness`]: config files, runs, sweeps and CSV/JSON output.

pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod stefan;
pub mod wavespeed;

pub use error::{Error, Result};
pub use model::{Model, MuStarConvention, RawParams};
