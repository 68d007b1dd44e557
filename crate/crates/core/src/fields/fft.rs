use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::par;

/// Planned 2D complex FFT on an `n x n` row-major array.
///
/// Spectral coefficients follow `f(x) = sum_k c_k exp(i k.x)`, so
/// [`Fft2::to_grid`] is the unnormalized inverse DFT and
/// [`Fft2::from_grid`] the forward DFT scaled by `1/n^2`.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

const ROWS_PER_TASK: usize = 8;

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn rows(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let scratch_len = plan.get_inplace_scratch_len();
        par::for_each_chunk_mut(data, n * ROWS_PER_TASK, |_, chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); scratch_len];
            plan.process_with_scratch(chunk, &mut scratch);
        });
    }

    fn transpose(&self, data: &mut [Complex64]) {
        let n = self.n;
        const B: usize = 16;
        for bi in (0..n).step_by(B) {
            for bj in (bi..n).step_by(B) {
                for i in bi..(bi + B).min(n) {
                    let start = if bi == bj { i + 1 } else { bj };
                    for j in start..(bj + B).min(n) {
                        data.swap(i * n + j, j * n + i);
                    }
                }
            }
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.n * self.n);
        self.rows(data, plan);
        self.transpose(data);
        self.rows(data, plan);
        self.transpose(data);
    }

    /// Grid samples (complex) of a spectrum.
    pub fn to_grid(&self, spectrum: &[Complex64]) -> Vec<Complex64> {
        let mut data = spectrum.to_vec();
        self.transform(&mut data, &self.inverse);
        data
    }

    /// Spectrum of complex grid samples.
    pub fn from_grid(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut data = values.to_vec();
        self.transform(&mut data, &self.forward);
        let scale = 1.0 / (self.n * self.n) as f64;
        for c in &mut data {
            *c *= scale;
        }
        data
    }

    /// Two real fields from two Hermitian spectra with one complex transform.
    pub fn to_grid_pair(&self, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let mut data: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + i * y).collect();
        self.transform(&mut data, &self.inverse);
        (
            data.iter().map(|z| z.re).collect(),
            data.iter().map(|z| z.im).collect(),
        )
    }

    /// Spectra of two real fields with one complex transform. The outputs
    /// are exactly Hermitian.
    pub fn from_grid_pair(&self, f: &[f64], g: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let mut data: Vec<Complex64> = f
            .iter()
            .zip(g)
            .map(|(&x, &y)| Complex64::new(x, y))
            .collect();
        self.transform(&mut data, &self.forward);
        let scale = 1.0 / (n * n) as f64;
        let mut fa = vec![Complex64::new(0.0, 0.0); n * n];
        let mut ga = vec![Complex64::new(0.0, 0.0); n * n];
        for i1 in 0..n {
            let m1 = (n - i1) % n;
            for i2 in 0..n {
                let m2 = (n - i2) % n;
                let z = data[i1 * n + i2];
                let zm = data[m1 * n + m2].conj();
                fa[i1 * n + i2] = (z + zm) * (0.5 * scale);
                // (z - zm) / 2i
                let d = z - zm;
                ga[i1 * n + i2] = Complex64::new(d.im, -d.re) * (0.5 * scale);
            }
        }
        (fa, ga)
    }
}
