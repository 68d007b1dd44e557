use num_complex::Complex64;

use super::eval::ScalarEvaluator;
use super::grid::TorusGrid;
use super::spectral::{SpectralField2D, VectorSpectrum};

/// Scalar stream function `psi` with `f = grad_perp psi = (d_y psi, -d_x psi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamFunction {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl StreamFunction {
    pub fn from_coeffs(grid: TorusGrid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `grad_perp psi`; the mean of `psi` is irrelevant.
    pub fn perp_gradient(&self) -> SpectralField2D {
        let g = self.grid;
        let i = Complex64::new(0.0, 1.0);
        let mut s = VectorSpectrum::zeros(g);
        for j in 0..g.len() {
            if g.is_nyquist(j) {
                continue;
            }
            let (k1, k2) = g.mode(j);
            s.component_mut(0)[j] = i * k2 as f64 * self.coeffs[j];
            s.component_mut(1)[j] = -i * k1 as f64 * self.coeffs[j];
        }
        SpectralField2D::from_spectrum_unchecked(s)
    }

    pub fn evaluator(&self) -> ScalarEvaluator {
        ScalarEvaluator::new(self.grid, &self.coeffs)
    }
}

/// Stream function of a zero-average divergence-free field:
/// `psi(k) = i (k1 f2(k) - k2 f1(k)) / |k|^2`, `psi(0) = 0`.
pub fn stream_function(f: &SpectralField2D) -> StreamFunction {
    let g = f.grid();
    let i = Complex64::new(0.0, 1.0);
    let coeffs = (0..g.len())
        .map(|j| {
            if j == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let (k1, k2) = g.mode(j);
            let kk = (k1 * k1 + k2 * k2) as f64;
            i * (f.component(1)[j] * k1 as f64 - f.component(0)[j] * k2 as f64) / kk
        })
        .collect();
    StreamFunction { grid: g, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::taylor::{make_taylor, make_tilde_t1, TaylorSpec};

    #[test]
    fn t11_stream_function() {
        // psi = -sin x cos y
        let f = make_taylor(TaylorSpec::new(1, 1).unwrap(), 1.0, TorusGrid::new(16).unwrap()).unwrap();
        let psi = stream_function(&f).evaluator();
        for &(x, y) in &[(0.3, 1.2), (2.5, 5.0), (4.0, 0.1)] {
            let want = -(x as f64).sin() * (y as f64).cos();
            assert!((psi.value([x, y]) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn tilde_t1_stream_function() {
        // psi = -cos y + cos(x) / 2: d_y psi = sin y, -d_x psi = sin(x) / 2
        let f = make_tilde_t1(TorusGrid::new(16).unwrap()).unwrap();
        let psi = stream_function(&f).evaluator();
        for &(x, y) in &[(0.3, 1.2), (2.5, 5.0), (4.0, 0.1)] {
            let want = -(y as f64).cos() + 0.5 * (x as f64).cos();
            assert!((psi.value([x, y]) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_is_exact() {
        let grid = TorusGrid::new(16).unwrap();
        let f = make_taylor(TaylorSpec::new(3, 1).unwrap(), 2.0, grid)
            .unwrap()
            .combine(1.0, &make_tilde_t1(grid).unwrap(), -0.7);
        let back = stream_function(&f).perp_gradient();
        assert!(back.sub(&f).l2_norm() / f.l2_norm() < 1e-12);
    }
}
