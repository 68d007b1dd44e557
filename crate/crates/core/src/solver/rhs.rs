use num_complex::Complex64;

use super::state::MHDState;
use crate::fields::{leray_project_in_place, Fft2, SpectralField2D, TorusGrid, VectorSpectrum};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pseudo-spectral evaluator of the quadratic MHD terms.
///
/// Both tendencies are formed from four grid products in divergence form:
/// `-(u.grad)u + (b.grad)b = -div(u (x) u - b (x) b)` and
/// `-(u.grad)b + (b.grad)u = grad_perp(u1 b2 - u2 b1)`, which agree with the
/// advective forms for divergence-free `u`, `b`.
#[derive(Clone, Debug)]
pub struct NonlinearTerm {
    grid: TorusGrid,
    fft: Fft2,
    dealias: bool,
}

/// Projected nonlinear tendencies plus the largest grid velocity seen.
#[derive(Clone, Debug)]
pub struct Tendency {
    pub du: VectorSpectrum,
    pub db: VectorSpectrum,
    pub max_velocity: f64,
}

impl NonlinearTerm {
    pub fn new(grid: TorusGrid, dealias: bool) -> Self {
        Self {
            grid,
            fft: Fft2::new(grid.resolution()),
            dealias,
        }
    }

    pub fn fft(&self) -> &Fft2 {
        &self.fft
    }

    /// Unprojected-then-projected tendencies of the quadratic terms; no
    /// diffusion, no forcing.
    pub fn evaluate(&self, u: &SpectralField2D, b: &SpectralField2D) -> Tendency {
        self.evaluate_spectra(u.spectrum(), b.spectrum())
    }

    pub(crate) fn evaluate_spectra(&self, u: &VectorSpectrum, b: &VectorSpectrum) -> Tendency {
        let n = self.grid.len();
        let (u1, u2) = self.fft.to_grid_pair(u.component(0), u.component(1));
        let (b1, b2) = self.fft.to_grid_pair(b.component(0), b.component(1));
        let mut p11 = vec![0.0; n];
        let mut p12 = vec![0.0; n];
        let mut p22 = vec![0.0; n];
        let mut e = vec![0.0; n];
        let mut vmax: f64 = 0.0;
        for j in 0..n {
            p11[j] = u1[j] * u1[j] - b1[j] * b1[j];
            p12[j] = u1[j] * u2[j] - b1[j] * b2[j];
            p22[j] = u2[j] * u2[j] - b2[j] * b2[j];
            e[j] = u1[j] * b2[j] - u2[j] * b1[j];
            vmax = vmax.max(u1[j].abs()).max(u2[j].abs());
        }
        let (s11, s12) = self.fft.from_grid_pair(&p11, &p12);
        let (s22, se) = self.fft.from_grid_pair(&p22, &e);

        let mut du = VectorSpectrum::zeros(self.grid);
        let mut db = VectorSpectrum::zeros(self.grid);
        let cut = self.grid.dealias_cutoff();
        for j in 0..n {
            let (k1, k2) = self.grid.mode(j);
            if self.dealias && k1.abs().max(k2.abs()) > cut {
                continue;
            }
            let (k1, k2) = (k1 as f64, k2 as f64);
            du.component_mut(0)[j] = -I * (s11[j] * k1 + s12[j] * k2);
            du.component_mut(1)[j] = -I * (s12[j] * k1 + s22[j] * k2);
            db.component_mut(0)[j] = I * k2 * se[j];
            db.component_mut(1)[j] = -I * k1 * se[j];
        }
        leray_project_in_place(&mut du);
        leray_project_in_place(&mut db);
        Tendency {
            du,
            db,
            max_velocity: vmax,
        }
    }

    /// Total pressure `P` (zero mean) from `-Lap P = div((u.grad)u - (b.grad)b)`.
    pub fn pressure(&self, u: &SpectralField2D, b: &SpectralField2D) -> Vec<Complex64> {
        let n = self.grid.len();
        let [u1, u2] = u.to_grid(&self.fft);
        let [b1, b2] = b.to_grid(&self.fft);
        let p11: Vec<f64> = (0..n).map(|j| u1[j] * u1[j] - b1[j] * b1[j]).collect();
        let p12: Vec<f64> = (0..n).map(|j| u1[j] * u2[j] - b1[j] * b2[j]).collect();
        let p22: Vec<f64> = (0..n).map(|j| u2[j] * u2[j] - b2[j] * b2[j]).collect();
        let (s11, s12) = self.fft.from_grid_pair(&p11, &p12);
        let (s22, _) = self.fft.from_grid_pair(&p22, &p22);
        (0..n)
            .map(|j| {
                if j == 0 || self.grid.is_nyquist(j) {
                    return Complex64::new(0.0, 0.0);
                }
                let (k1, k2) = self.grid.mode(j);
                let (k1, k2) = (k1 as f64, k2 as f64);
                // g = div(u (x) u - b (x) b), so g(k) = i k_j S_ij(k) and
                // P(k) = i k . g(k) / |k|^2 = -k_i k_j S_ij / |k|^2
                -(s11[j] * k1 * k1 + 2.0 * s12[j] * k1 * k2 + s22[j] * k2 * k2) / (k1 * k1 + k2 * k2)
            })
            .collect()
    }
}

/// Projected quadratic tendencies `(du, db)` of a state.
pub fn nonlinear_rhs(state: &MHDState, dealias: bool) -> (SpectralField2D, SpectralField2D) {
    let t = NonlinearTerm::new(state.grid(), dealias).evaluate(&state.u, &state.b);
    (
        SpectralField2D::from_spectrum_unchecked(t.du),
        SpectralField2D::from_spectrum_unchecked(t.db),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{advect, leray_project, make_taylor, make_tilde_t1, ScalarEvaluator, TaylorSpec};

    fn g(m: usize) -> TorusGrid {
        TorusGrid::new(m).unwrap()
    }

    #[test]
    fn taylor_field_is_magnetostatic() {
        for (n, m) in [(1, 1), (2, 3), (4, 4)] {
            let b = make_taylor(TaylorSpec::new(n, m).unwrap(), 1.0, g(32)).unwrap();
            let (du, db) = nonlinear_rhs(&MHDState::magnetic(b), true);
            assert!(du.max_coeff() < 1e-12, "du {}", du.max_coeff());
            assert!(db.max_coeff() < 1e-12);
        }
    }

    #[test]
    fn equal_fields_freeze_induction() {
        let grid = g(32);
        let f = make_taylor(TaylorSpec::new(2, 1).unwrap(), 1.0, grid)
            .unwrap()
            .combine(1.0, &make_tilde_t1(grid).unwrap(), 0.8);
        let s = MHDState::new(f.clone(), f, 0.0).unwrap();
        let (_, db) = nonlinear_rhs(&s, true);
        assert_eq!(db.max_coeff(), 0.0);
    }

    #[test]
    fn cross_term_tendency() {
        let grid = g(32);
        let fft = Fft2::new(32);
        let a = make_taylor(TaylorSpec::new(4, 4).unwrap(), 1.0, grid).unwrap();
        let c = make_taylor(TaylorSpec::new(1, 1).unwrap(), 1.0, grid).unwrap();
        let (du, db) = nonlinear_rhs(&MHDState::magnetic(a.combine(1.0, &c, 1.0)), true);
        let mut cross = advect(&a, &c, &fft);
        cross.axpy(1.0, &advect(&c, &a, &fft));
        let want = leray_project(&cross);
        assert!(du.sub(&want).max_coeff() < 1e-13);
        assert!(db.max_coeff() < 1e-13);
    }

    #[test]
    fn pressure_of_tilde_t1() {
        // (b.grad)b = grad(-cos x cos y / 2), u = 0  =>  P = -cos x cos y / 2
        let grid = g(16);
        let b = make_tilde_t1(grid).unwrap();
        let nl = NonlinearTerm::new(grid, true);
        let p = ScalarEvaluator::new(grid, &nl.pressure(&SpectralField2D::zeros(grid), &b));
        for &(x, y) in &[(0.4f64, 1.3f64), (3.0, 5.5)] {
            let (got, want) = (p.value([x, y]), -0.5 * x.cos() * y.cos());
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }
}
