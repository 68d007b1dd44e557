use num_complex::Complex64;

use super::fft::Fft2;
use super::grid::TorusGrid;
use super::spectral::{SpectralField2D, AREA};

/// Inhomogeneous Sobolev norm `(sum_k (1 + |k|^2)^r |f(k)|^2)^(1/2)` over both
/// components, under the unnormalized inner product on `[0, 2pi)^2`
/// (`r = 0` is the L^2 norm).
pub fn sobolev_norm(f: &SpectralField2D, r: u32) -> f64 {
    let grid = f.grid();
    let mut s = 0.0;
    for i in 0..grid.len() {
        let a = f.component(0)[i].norm_sqr() + f.component(1)[i].norm_sqr();
        if a == 0.0 {
            continue;
        }
        let (k1, k2) = grid.mode(i);
        s += (1.0 + (k1 * k1 + k2 * k2) as f64).powi(r as i32) * a;
    }
    (AREA * s).sqrt()
}

/// Copy a spectrum onto a finer `p x p` lattice (zero padding).
pub(crate) fn pad_spectrum(grid: TorusGrid, coeffs: &[Complex64], p: usize) -> Vec<Complex64> {
    let fine = TorusGrid::new(p).expect("padded size is even and >= 8");
    let mut out = vec![Complex64::new(0.0, 0.0); fine.len()];
    for (i, &c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 || grid.is_nyquist(i) {
            continue;
        }
        let (k1, k2) = grid.mode(i);
        out[fine.index(k1, k2).expect("padding only grows the lattice")] = c;
    }
    out
}

/// Samples of `f` and its four first derivatives on a `p x p` grid,
/// `p >= M`: `[f1, f2, d1 f1, d2 f1, d1 f2, d2 f2]`.
pub(crate) fn sample_with_gradient(f: &SpectralField2D, p: usize) -> [Vec<f64>; 6] {
    let grid = f.grid();
    let i = Complex64::new(0.0, 1.0);
    let deriv = |c: usize, axis: usize| -> Vec<Complex64> {
        (0..grid.len())
            .map(|j| {
                let (k1, k2) = grid.mode(j);
                let k = if axis == 0 { k1 } else { k2 };
                i * k as f64 * f.component(c)[j]
            })
            .collect()
    };
    let fft = Fft2::new(p);
    let pad = |v: &[Complex64]| pad_spectrum(grid, v, p);
    let (a, b) = fft.to_grid_pair(&pad(f.component(0)), &pad(f.component(1)));
    let (c, d) = fft.to_grid_pair(&pad(&deriv(0, 0)), &pad(&deriv(0, 1)));
    let (e, g) = fft.to_grid_pair(&pad(&deriv(1, 0)), &pad(&deriv(1, 1)));
    [a, b, c, d, e, g]
}

/// Discrete C^1 norm: `sup |f|_max + sup |grad f|_max` over an
/// `(oversample * M)^2` grid built by zero-padded spectral upsampling.
pub fn c1_norm(f: &SpectralField2D, oversample: usize) -> f64 {
    assert!(oversample >= 2, "c1_norm oversample must be >= 2");
    if f.is_zero() {
        return 0.0;
    }
    let p = oversample * f.grid().resolution();
    let s = sample_with_gradient(f, p);
    let sup = |fields: &[Vec<f64>]| {
        fields
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
    };
    sup(&s[0..2]) + sup(&s[2..6])
}

/// Default oversampling factor for [`c1_norm`].
pub const C1_OVERSAMPLE: usize = 4;
