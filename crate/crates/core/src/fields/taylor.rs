//! Taylor fields: divergence-free Laplacian eigenfunctions on the torus.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use super::spectral::{SpectralField2D, VectorSpectrum};
use crate::error::{Error, Result};

/// Wavenumber pair of `T_nm = (m sin nx sin my, n cos nx cos my)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaylorSpec {
    pub n: u32,
    pub m: u32,
}

impl TaylorSpec {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Config(format!(
                "Taylor wavenumbers must be positive, got ({n}, {m})"
            )));
        }
        Ok(Self { n, m })
    }

    /// `N^2 = n^2 + m^2`, the eigenvalue of `-Laplacian`.
    pub fn eigenvalue(&self) -> f64 {
        (self.n * self.n + self.m * self.m) as f64
    }

    /// `N = sqrt(n^2 + m^2)`.
    pub fn norm(&self) -> f64 {
        self.eigenvalue().sqrt()
    }

    /// Exact number of zeros of `T_nm` on the torus.
    pub fn critical_point_count(&self) -> usize {
        8 * (self.n * self.m) as usize
    }

    pub(crate) fn check_resolvable(&self, grid: TorusGrid) -> Result<()> {
        let half = grid.nyquist();
        if i64::from(self.n) >= half || i64::from(self.m) >= half {
            return Err(Error::Config(format!(
                "Taylor mode ({}, {}) is not resolvable on a {}^2 grid",
                self.n,
                self.m,
                grid.resolution()
            )));
        }
        Ok(())
    }
}

/// A Taylor mode usable as a building block: `T_nm` or `T~1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TaylorMode {
    Nm { n: u32, m: u32 },
    Tilde1,
}

impl TaylorMode {
    pub fn eigenvalue(&self) -> f64 {
        match *self {
            TaylorMode::Nm { n, m } => (n * n + m * m) as f64,
            TaylorMode::Tilde1 => 1.0,
        }
    }

    pub fn field(&self, amplitude: f64, grid: TorusGrid) -> Result<SpectralField2D> {
        match *self {
            TaylorMode::Nm { n, m } => make_taylor(TaylorSpec::new(n, m)?, amplitude, grid),
            TaylorMode::Tilde1 => Ok(make_tilde_t1(grid)?.scaled(amplitude)),
        }
    }
}

impl From<TaylorSpec> for TaylorMode {
    fn from(s: TaylorSpec) -> Self {
        TaylorMode::Nm { n: s.n, m: s.m }
    }
}

/// `amplitude * T_nm` on `grid`.
pub fn make_taylor(spec: TaylorSpec, amplitude: f64, grid: TorusGrid) -> Result<SpectralField2D> {
    spec.check_resolvable(grid)?;
    let (n, m) = (i64::from(spec.n), i64::from(spec.m));
    let mut s = VectorSpectrum::zeros(grid);
    let q1 = 0.25 * amplitude * m as f64;
    let q2 = 0.25 * amplitude * n as f64;
    // sin nx sin my = -(1/4) sum_{+-,+-} (+-)(+-) e^{i(+-n x +- m y)}
    for (s1, s2) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
        let idx = grid.index(s1 * n, s2 * m).expect("checked resolvable");
        s.component_mut(0)[idx] = Complex64::new(-q1 * (s1 * s2) as f64, 0.0);
        s.component_mut(1)[idx] = Complex64::new(q2, 0.0);
    }
    Ok(SpectralField2D::from_spectrum_unchecked(s))
}

/// `T~1 = (sin y, sin(x) / 2)`, eigenvalue 1.
pub fn make_tilde_t1(grid: TorusGrid) -> Result<SpectralField2D> {
    let mut s = VectorSpectrum::zeros(grid);
    let half_i = Complex64::new(0.0, 0.5);
    let p = grid.index(0, 1).expect("grid >= 8");
    let q = grid.index(0, -1).expect("grid >= 8");
    s.component_mut(0)[p] = -half_i;
    s.component_mut(0)[q] = half_i;
    let p = grid.index(1, 0).expect("grid >= 8");
    let q = grid.index(-1, 0).expect("grid >= 8");
    s.component_mut(1)[p] = -half_i * 0.5;
    s.component_mut(1)[q] = half_i * 0.5;
    Ok(SpectralField2D::from_spectrum_unchecked(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::eval::FieldEvaluator;
    use std::f64::consts::PI;

    fn g(m: usize) -> TorusGrid {
        TorusGrid::new(m).unwrap()
    }

    #[test]
    fn t11_at_quarter_point() {
        let f = make_taylor(TaylorSpec::new(1, 1).unwrap(), 1.0, g(16)).unwrap();
        let v = FieldEvaluator::new(&f).value([PI / 2.0, PI / 2.0]);
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1].abs() < 1e-15);
        let v = FieldEvaluator::new(&f).value([0.0, 0.0]);
        assert!(v[0].abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tilde_t1_values() {
        let f = make_tilde_t1(g(8)).unwrap();
        let e = FieldEvaluator::new(&f);
        let v = e.value([PI / 2.0, PI / 2.0]);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
        let v = e.value([PI, PI]);
        assert!(v[0].abs() < 1e-15 && v[1].abs() < 1e-15);
    }

    #[test]
    fn laplacian_eigenvalues() {
        let grid = g(16);
        let t11 = make_taylor(TaylorSpec::new(1, 1).unwrap(), 1.0, grid).unwrap();
        assert!(t11.laplacian().combine(1.0, &t11, 2.0).max_coeff() == 0.0);
        let t23 = make_taylor(TaylorSpec::new(2, 3).unwrap(), 1.0, grid).unwrap();
        assert!(t23.laplacian().combine(1.0, &t23, 13.0).l2_norm() < 1e-12);
        let t1 = make_tilde_t1(grid).unwrap();
        assert_eq!(t1.laplacian().scaled(-1.0), t1);
    }

    #[test]
    fn invariants_hold() {
        let grid = g(16);
        for n in 1..=4 {
            for m in 1..=4 {
                let f = make_taylor(TaylorSpec::new(n, m).unwrap(), 0.7, grid).unwrap();
                SpectralField2D::try_from_spectrum(f.spectrum().clone(), 1e-14).unwrap();
                let nonzero = f.component(0).iter().filter(|c| c.norm() > 0.0).count();
                assert_eq!(nonzero, 4);
            }
        }
        let t1 = make_tilde_t1(grid).unwrap();
        assert!(t1.divergence().iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn unresolvable_mode_is_config_error() {
        let r = make_taylor(TaylorSpec::new(4, 1).unwrap(), 1.0, g(8));
        assert!(matches!(r, Err(Error::Config(_))));
        assert!(TaylorSpec::new(0, 2).is_err());
    }
}
