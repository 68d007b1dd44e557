//! Divergence-free vector fields on the 2-torus in spectral form.

mod eval;
mod fft;
mod grid;
mod norms;
mod spectral;
mod stream;
mod taylor;

pub use eval::{eval_field, jacobian, FieldEvaluator, PointSample, ScalarEvaluator};
pub use fft::Fft2;
pub use grid::{torus_delta, torus_distance, wrap, wrap_point, TorusGrid};
pub use norms::{c1_norm, sobolev_norm, C1_OVERSAMPLE};
pub(crate) use norms::pad_spectrum;
pub use spectral::{advect, leray_project, SpectralField2D, VectorSpectrum};
pub(crate) use spectral::leray_project_in_place;
pub use stream::{stream_function, StreamFunction};
pub use taylor::{make_taylor, make_tilde_t1, TaylorMode, TaylorSpec};
