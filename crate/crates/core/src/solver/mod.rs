//! Time integration of the incompressible MHD system on the torus.

mod config;
mod integrator;
mod rhs;
mod sink;
mod state;

pub use config::{CustomForce, ForceTarget, ForcingSpec, SimConfig};
pub use integrator::{duhamel_remainder, heat_propagate, simulate, step, Integrator};
pub use rhs::{nonlinear_rhs, NonlinearTerm, Tendency};
pub use sink::{StateSink, TrajectoryRecorder};
pub use state::MHDState;
