use crate::error::Result;
use crate::fields::{SpectralField2D, TorusGrid};

/// Velocity, magnetic field and clock of an MHD solution.
#[derive(Clone, Debug, PartialEq)]
pub struct MHDState {
    pub u: SpectralField2D,
    pub b: SpectralField2D,
    pub t: f64,
}

impl MHDState {
    pub fn new(u: SpectralField2D, b: SpectralField2D, t: f64) -> Result<Self> {
        if u.grid() != b.grid() {
            return Err(crate::Error::Input(format!(
                "velocity grid {} differs from magnetic grid {}",
                u.grid().resolution(),
                b.grid().resolution()
            )));
        }
        Ok(Self { u, b, t })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            u: SpectralField2D::zeros(grid),
            b: SpectralField2D::zeros(grid),
            t: 0.0,
        }
    }

    /// `(0, b)` at `t = 0`.
    pub fn magnetic(b: SpectralField2D) -> Self {
        Self {
            u: SpectralField2D::zeros(b.grid()),
            b,
            t: 0.0,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.u.grid()
    }

    /// `(|u|^2 + |b|^2) / 2` integrated over the torus.
    pub fn energy(&self) -> f64 {
        0.5 * (self.u.l2_norm().powi(2) + self.b.l2_norm().powi(2))
    }

    pub fn cross_helicity(&self) -> f64 {
        self.u.inner_product(&self.b)
    }
}
