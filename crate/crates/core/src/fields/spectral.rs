use num_complex::Complex64;

use super::fft::Fft2;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Squared L^2 norm of `c_k exp(i k.x)` summed over modes, on `[0, 2pi)^2`.
pub(crate) const AREA: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

/// A two-component vector field in Fourier space with no structural
/// guarantees: the input to [`leray_project`] and the output of raw
/// pseudo-spectral products.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSpectrum {
    grid: TorusGrid,
    comps: [Vec<Complex64>; 2],
}

impl VectorSpectrum {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            grid,
            comps: [vec![ZERO; grid.len()], vec![ZERO; grid.len()]],
        }
    }

    pub fn from_components(grid: TorusGrid, c1: Vec<Complex64>, c2: Vec<Complex64>) -> Result<Self> {
        if c1.len() != grid.len() || c2.len() != grid.len() {
            return Err(Error::Input(format!(
                "component lengths {} and {} do not match grid size {}",
                c1.len(),
                c2.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, comps: [c1, c2] })
    }

    /// Spectrum of real grid samples of both components.
    pub fn from_grid_values(grid: TorusGrid, fft: &Fft2, v1: &[f64], v2: &[f64]) -> Self {
        let (c1, c2) = fft.from_grid_pair(v1, v2);
        Self { grid, comps: [c1, c2] }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.comps[i]
    }

    pub fn into_components(self) -> [Vec<Complex64>; 2] {
        self.comps
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> [Complex64; 2] {
        match self.grid.index(k1, k2) {
            Some(i) => [self.comps[0][i], self.comps[1][i]],
            None => [ZERO; 2],
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &VectorSpectrum) {
        for c in 0..2 {
            for (x, y) in self.comps[c].iter_mut().zip(&other.comps[c]) {
                *x += y * a;
            }
        }
    }

    /// Largest `|k . c(k)|` over all modes.
    pub fn max_divergence(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                let (k1, k2) = self.grid.mode(i);
                (self.comps[0][i] * k1 as f64 + self.comps[1][i] * k2 as f64).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|c(-k) - conj(c(k))|` over all non-Nyquist modes.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            if g.is_nyquist(i) {
                continue;
            }
            let j = g.mirror(i);
            for c in 0..2 {
                worst = worst.max((self.comps[c][j] - self.comps[c][i].conj()).norm());
            }
        }
        worst
    }

    /// Replace every coefficient by the average of itself and the conjugate
    /// of its mirror; Nyquist lines are cleared.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        for c in 0..2 {
            let comp = &mut self.comps[c];
            for i in 0..g.len() {
                if g.is_nyquist(i) {
                    comp[i] = ZERO;
                    continue;
                }
                let j = g.mirror(i);
                if j < i {
                    continue;
                }
                let avg = 0.5 * (comp[i] + comp[j].conj());
                comp[i] = avg;
                comp[j] = avg.conj();
            }
        }
    }

    /// Zero all modes with `max(|k1|, |k2|) > M/3`.
    pub fn dealias(&mut self) {
        let g = self.grid;
        let cut = g.dealias_cutoff();
        for i in 0..g.len() {
            let (k1, k2) = g.mode(i);
            if k1.abs().max(k2.abs()) > cut {
                self.comps[0][i] = ZERO;
                self.comps[1][i] = ZERO;
            }
        }
    }

    /// Unnormalized L^2 norm over `[0, 2pi)^2`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.comps.iter().flatten().map(|c| c.norm_sqr()).sum();
        (AREA * s).sqrt()
    }
}

/// Real, zero-average, divergence-free vector field on the torus stored as
/// full complex Fourier coefficients.
///
/// Invariants: `c(-k) = conj(c(k))`, `k . c(k) = 0`, `c(0) = 0`, and the
/// Nyquist lines `k1 = M/2` or `k2 = M/2` are empty (their conjugate
/// partners are not on the lattice).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField2D {
    inner: VectorSpectrum,
}

impl SpectralField2D {
    pub fn zeros(grid: TorusGrid) -> Self {
        Self {
            inner: VectorSpectrum::zeros(grid),
        }
    }

    /// Wrap a spectrum that is already known to satisfy the invariants,
    /// checking them to `tol` relative to the field's largest coefficient.
    pub fn try_from_spectrum(spec: VectorSpectrum, tol: f64) -> Result<Self> {
        let scale = spec
            .comps
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let g = spec.grid;
        let div = spec.max_divergence() / (scale * g.nyquist() as f64);
        let herm = spec.hermitian_defect() / scale;
        let mean = spec.comps[0][0].norm().max(spec.comps[1][0].norm()) / scale;
        let nyq = (0..g.len())
            .filter(|&i| g.is_nyquist(i))
            .map(|i| spec.comps[0][i].norm().max(spec.comps[1][i].norm()))
            .fold(0.0, f64::max)
            / scale;
        if div > tol || herm > tol || mean > tol || nyq > tol {
            return Err(Error::Input(format!(
                "spectrum violates field invariants (divergence {div:.2e}, hermitian {herm:.2e}, mean {mean:.2e}, nyquist {nyq:.2e})"
            )));
        }
        Ok(Self { inner: spec })
    }

    pub(crate) fn from_spectrum_unchecked(spec: VectorSpectrum) -> Self {
        Self { inner: spec }
    }

    pub fn grid(&self) -> TorusGrid {
        self.inner.grid
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        self.inner.component(i)
    }

    pub fn coeff(&self, k1: i64, k2: i64) -> [Complex64; 2] {
        self.inner.coeff(k1, k2)
    }

    pub fn spectrum(&self) -> &VectorSpectrum {
        &self.inner
    }

    pub fn into_spectrum(self) -> VectorSpectrum {
        self.inner
    }

    pub fn is_zero(&self) -> bool {
        self.inner.comps.iter().flatten().all(|c| *c == ZERO)
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn scale(&mut self, a: f64) {
        for c in self.inner.comps.iter_mut().flatten() {
            *c *= a;
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField2D) {
        self.inner.axpy(a, &other.inner);
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SpectralField2D, b: f64) -> Self {
        let mut out = self.scaled(a);
        out.axpy(b, other);
        out
    }

    pub fn sub(&self, other: &SpectralField2D) -> Self {
        self.combine(1.0, other, -1.0)
    }

    /// Multiply each mode by `g(|k|^2)`; any radial multiplier preserves
    /// the invariants.
    pub fn apply_radial(&self, g: impl Fn(f64) -> f64) -> Self {
        let grid = self.grid();
        let mut out = self.clone();
        for i in 0..grid.len() {
            let (k1, k2) = grid.mode(i);
            let f = g((k1 * k1 + k2 * k2) as f64);
            out.inner.comps[0][i] *= f;
            out.inner.comps[1][i] *= f;
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        self.apply_radial(|k2| -k2)
    }

    /// Spectral divergence, as scalar coefficients.
    pub fn divergence(&self) -> Vec<Complex64> {
        let g = self.grid();
        (0..g.len())
            .map(|i| {
                let (k1, k2) = g.mode(i);
                Complex64::new(0.0, 1.0)
                    * (self.inner.comps[0][i] * k1 as f64 + self.inner.comps[1][i] * k2 as f64)
            })
            .collect()
    }

    /// Unnormalized L^2 norm over `[0, 2pi)^2`.
    pub fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    /// `int f . g dx` over the torus.
    pub fn inner_product(&self, other: &SpectralField2D) -> f64 {
        let s: f64 = (0..2)
            .map(|c| {
                self.inner.comps[c]
                    .iter()
                    .zip(&other.inner.comps[c])
                    .map(|(a, b)| (a * b.conj()).re)
                    .sum::<f64>()
            })
            .sum();
        AREA * s
    }

    /// Real grid samples of both components.
    pub fn to_grid(&self, fft: &Fft2) -> [Vec<f64>; 2] {
        let (a, b) = fft.to_grid_pair(&self.inner.comps[0], &self.inner.comps[1]);
        [a, b]
    }

    /// Largest absolute coefficient over both components.
    pub fn max_coeff(&self) -> f64 {
        self.inner
            .comps
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn has_non_finite(&self) -> bool {
        self.inner
            .comps
            .iter()
            .flatten()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
    }
}

/// Orthogonal projection onto divergence-free, zero-average fields:
/// `g(k) -> g(k) - k (k . g(k)) / |k|^2`, with `k = 0` and the Nyquist
/// lines cleared.
pub fn leray_project(g: &VectorSpectrum) -> SpectralField2D {
    let mut out = g.clone();
    leray_project_in_place(&mut out);
    SpectralField2D::from_spectrum_unchecked(out)
}

pub(crate) fn leray_project_in_place(spec: &mut VectorSpectrum) {
    let grid = spec.grid;
    let [c1, c2] = &mut spec.comps;
    for i in 0..grid.len() {
        if i == 0 || grid.is_nyquist(i) {
            c1[i] = ZERO;
            c2[i] = ZERO;
            continue;
        }
        let (k1, k2) = grid.mode(i);
        let (k1, k2) = (k1 as f64, k2 as f64);
        let kk = k1 * k1 + k2 * k2;
        let dot = (c1[i] * k1 + c2[i] * k2) / kk;
        c1[i] -= dot * k1;
        c2[i] -= dot * k2;
    }
}

/// Raw spectrum of `(a . grad) b`, computed on the grid without dealiasing.
/// Exact when the combined bandwidth of `a` and `b` stays below `M/2`.
pub fn advect(a: &SpectralField2D, b: &SpectralField2D, fft: &Fft2) -> VectorSpectrum {
    let grid = a.grid();
    let n = grid.len();
    let i = Complex64::new(0.0, 1.0);
    let mut dx = [vec![ZERO; n], vec![ZERO; n]];
    let mut dy = [vec![ZERO; n], vec![ZERO; n]];
    for f in 0..n {
        let (k1, k2) = grid.mode(f);
        for c in 0..2 {
            dx[c][f] = i * k1 as f64 * b.component(c)[f];
            dy[c][f] = i * k2 as f64 * b.component(c)[f];
        }
    }
    let [a1, a2] = a.to_grid(fft);
    let (bx1, bx2) = fft.to_grid_pair(&dx[0], &dx[1]);
    let (by1, by2) = fft.to_grid_pair(&dy[0], &dy[1]);
    let p1: Vec<f64> = (0..n).map(|j| a1[j] * bx1[j] + a2[j] * by1[j]).collect();
    let p2: Vec<f64> = (0..n).map(|j| a1[j] * bx2[j] + a2[j] * by2[j]).collect();
    VectorSpectrum::from_grid_values(grid, fft, &p1, &p2)
}
