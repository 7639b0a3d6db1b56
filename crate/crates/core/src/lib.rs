//! Pseudo-spectral solver for the anisotropic incompressible Navier-Stokes
//! equations with power-law or logarithmic damping on a periodic box, and a
//! harness that checks the energy inequalities of those systems along
//! computed trajectories.
//!
//! Start with [`dynamics::run`] for a trajectory, [`diagnostics`] for the
//! inequality checks and [`harness`] for the file-based workflow behind the
//! `nsdamp` binary.

// NaN-rejecting checks are written as `!(x <= bound)` on purpose, and index
// loops over parallel component arrays read better than zipped iterators.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checkpoint;
pub mod config;
pub mod damping;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod operators;
pub mod oracle;
pub mod random;
pub mod tolerance;

pub use config::SolverConfig;
pub use damping::DampingSpec;
pub use error::{Error, Result};
pub use field::{PhysicalVectorField, SpectralVectorField};
pub use grid::Grid;
