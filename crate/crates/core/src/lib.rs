//! Pseudo-spectral simulation of incompressible 2D MHD on the torus, with
//! critical-point and separatrix analysis of magnetic field lines.

pub mod error;
pub mod experiments;
pub mod fields;
pub mod oracles;
pub mod solver;
pub mod topology;
mod par;

pub use error::{Error, Result};
pub use par::{is_parallel, with_threads};
