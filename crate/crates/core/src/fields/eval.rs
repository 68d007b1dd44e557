//! Off-grid evaluation of spectral fields by direct trigonometric sums.

use num_complex::Complex64;

use super::spectral::SpectralField2D;

#[derive(Clone, Copy, Debug)]
struct Mode {
    k1: i32,
    k2: i32,
    c: [Complex64; 2],
}

/// Compiled list of the active modes of a vector field.
///
/// Conjugate pairs are folded onto one half-plane so each evaluation costs
/// one complex multiply per retained pair.
#[derive(Clone, Debug)]
pub struct FieldEvaluator {
    modes: Vec<Mode>,
    kmax: i32,
}

/// Value and Jacobian `J[i][j] = d f_i / d x_j` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSample {
    pub value: [f64; 2],
    pub jacobian: [[f64; 2]; 2],
}

fn phase_table(x: f64, kmax: i32) -> Vec<Complex64> {
    (-kmax..=kmax)
        .map(|k| {
            let (s, c) = (k as f64 * x).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

impl FieldEvaluator {
    /// Exact evaluator over every nonzero mode.
    pub fn new(f: &SpectralField2D) -> Self {
        Self::with_pruning(f, 0.0)
    }

    /// Drop pairs whose coefficients are below `rel_tol` times the largest
    /// coefficient.
    pub fn with_pruning(f: &SpectralField2D, rel_tol: f64) -> Self {
        let grid = f.grid();
        let (c1, c2) = (f.component(0), f.component(1));
        let cutoff = rel_tol * f.max_coeff();
        let mut modes = Vec::new();
        let mut kmax = 0;
        for i in 0..grid.len() {
            let (k1, k2) = grid.mode(i);
            let mag = c1[i].norm().max(c2[i].norm());
            if mag == 0.0 || mag < cutoff {
                continue;
            }
            let upper = k1 > 0 || (k1 == 0 && k2 > 0);
            let paired = !grid.is_nyquist(i);
            let (w, keep) = if paired { (2.0, upper) } else { (1.0, true) };
            if !keep {
                continue;
            }
            kmax = kmax.max(k1.abs().max(k2.abs()) as i32);
            modes.push(Mode {
                k1: k1 as i32,
                k2: k2 as i32,
                c: [c1[i] * w, c2[i] * w],
            });
        }
        Self { modes, kmax }
    }

    pub fn active_modes(&self) -> usize {
        self.modes.len()
    }

    /// Upper bound on `sup |f_i|` over the torus.
    pub fn amplitude_bound(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| m.c[0].norm().max(m.c[1].norm()))
            .sum()
    }

    pub fn value(&self, x: [f64; 2]) -> [f64; 2] {
        let ex = phase_table(x[0], self.kmax);
        let ey = phase_table(x[1], self.kmax);
        let off = self.kmax;
        let mut v = [0.0; 2];
        for md in &self.modes {
            let e = ex[(md.k1 + off) as usize] * ey[(md.k2 + off) as usize];
            v[0] += (md.c[0] * e).re;
            v[1] += (md.c[1] * e).re;
        }
        v
    }

    pub fn sample(&self, x: [f64; 2]) -> PointSample {
        let ex = phase_table(x[0], self.kmax);
        let ey = phase_table(x[1], self.kmax);
        let off = self.kmax;
        let mut v = [0.0; 2];
        let mut j = [[0.0; 2]; 2];
        for md in &self.modes {
            let e = ex[(md.k1 + off) as usize] * ey[(md.k2 + off) as usize];
            for c in 0..2 {
                let z = md.c[c] * e;
                v[c] += z.re;
                // d/dx Re(z e^{ikx}) = Re(i k z) = -k Im(z)
                j[c][0] -= md.k1 as f64 * z.im;
                j[c][1] -= md.k2 as f64 * z.im;
            }
        }
        PointSample {
            value: v,
            jacobian: j,
        }
    }

    pub fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        self.sample(x).jacobian
    }
}

/// Evaluator for a real scalar field given by its Fourier coefficients.
#[derive(Clone, Debug)]
pub struct ScalarEvaluator {
    modes: Vec<(i32, i32, Complex64)>,
    kmax: i32,
}

impl ScalarEvaluator {
    pub fn new(grid: super::grid::TorusGrid, coeffs: &[Complex64]) -> Self {
        let mut modes = Vec::new();
        let mut kmax = 0;
        for (i, &c) in coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let (k1, k2) = grid.mode(i);
            let upper = k1 > 0 || (k1 == 0 && k2 > 0);
            let (w, keep) = if i == 0 || grid.is_nyquist(i) {
                (1.0, true)
            } else {
                (2.0, upper)
            };
            if keep {
                kmax = kmax.max(k1.abs().max(k2.abs()) as i32);
                modes.push((k1 as i32, k2 as i32, c * w));
            }
        }
        Self { modes, kmax }
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        let ex = phase_table(x[0], self.kmax);
        let ey = phase_table(x[1], self.kmax);
        let off = self.kmax;
        self.modes
            .iter()
            .map(|&(k1, k2, c)| (c * ex[(k1 + off) as usize] * ey[(k2 + off) as usize]).re)
            .sum()
    }
}

/// Evaluate `f` at `x`.
pub fn eval_field(f: &SpectralField2D, x: [f64; 2]) -> [f64; 2] {
    FieldEvaluator::new(f).value(x)
}

/// Spectral Jacobian of `f` at `x`.
pub fn jacobian(f: &SpectralField2D, x: [f64; 2]) -> [[f64; 2]; 2] {
    FieldEvaluator::new(f).jacobian(x)
}
