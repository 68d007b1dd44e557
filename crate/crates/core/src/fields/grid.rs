use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform `M x M` grid over `[0, 2pi)^2` and its wavenumber lattice.
///
/// Storage index `i` along an axis maps to wavenumber `i` for `i <= M/2`
/// and to `i - M` above that, so the lattice is `{-M/2+1, ..., M/2}`.
/// Arrays are row-major with the x-wavenumber (`k1`) as the slow index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    m: usize,
}

impl TorusGrid {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 8 || resolution % 2 != 0 {
            return Err(Error::Config(format!(
                "grid resolution must be even and >= 8, got {resolution}"
            )));
        }
        Ok(Self { m: resolution })
    }

    #[inline]
    pub fn resolution(&self) -> usize {
        self.m
    }

    /// Number of lattice points, `M^2`.
    #[inline]
    pub fn len(&self) -> usize {
        self.m * self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    #[inline]
    pub fn nyquist(&self) -> i64 {
        (self.m / 2) as i64
    }

    /// Wavenumber stored at axis index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.m / 2 {
            i as i64
        } else {
            i as i64 - self.m as i64
        }
    }

    /// Axis index of wavenumber `k`, if it lies on the lattice.
    #[inline]
    pub fn axis_index(&self, k: i64) -> Option<usize> {
        let half = self.nyquist();
        if k > half || k <= -half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.m as i64) as usize)
        }
    }

    /// Flat index of the mode `(k1, k2)`.
    #[inline]
    pub fn index(&self, k1: i64, k2: i64) -> Option<usize> {
        Some(self.axis_index(k1)? * self.m + self.axis_index(k2)?)
    }

    /// Wavenumber pair of a flat index.
    #[inline]
    pub fn mode(&self, flat: usize) -> (i64, i64) {
        (self.wavenumber(flat / self.m), self.wavenumber(flat % self.m))
    }

    /// Flat index holding the conjugate partner `-k` of `flat`.
    #[inline]
    pub fn mirror(&self, flat: usize) -> usize {
        let (i1, i2) = (flat / self.m, flat % self.m);
        ((self.m - i1) % self.m) * self.m + (self.m - i2) % self.m
    }

    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = self.m / 2;
        flat / self.m == half || flat % self.m == half
    }

    /// Largest retained wavenumber under the 2/3 rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.m / 3) as i64
    }

    /// Physical coordinates of grid node `(j1, j2)`.
    #[inline]
    pub fn node(&self, j1: usize, j2: usize) -> [f64; 2] {
        let h = self.spacing();
        [j1 as f64 * h, j2 as f64 * h]
    }

    /// `|k|^2` for every flat index.
    pub fn k_squared(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let (k1, k2) = self.mode(i);
                (k1 * k1 + k2 * k2) as f64
            })
            .collect()
    }
}

/// Wrap a coordinate into `[0, 2pi)`.
#[inline]
pub fn wrap(x: f64) -> f64 {
    let t = 2.0 * PI;
    let w = x.rem_euclid(t);
    if w >= t {
        0.0
    } else {
        w
    }
}

#[inline]
pub fn wrap_point(p: [f64; 2]) -> [f64; 2] {
    [wrap(p[0]), wrap(p[1])]
}

/// Flat-torus distance with coordinate wrapping.
#[inline]
pub fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let t = 2.0 * PI;
    let d = |x: f64, y: f64| {
        let r = (x - y).rem_euclid(t);
        r.min(t - r)
    };
    d(a[0], b[0]).hypot(d(a[1], b[1]))
}

/// Displacement `b - a` reduced to the nearest periodic image.
#[inline]
pub fn torus_delta(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let t = 2.0 * PI;
    let d = |x: f64, y: f64| {
        let r = (y - x).rem_euclid(t);
        if r > PI {
            r - t
        } else {
            r
        }
    };
    [d(a[0], b[0]), d(a[1], b[1])]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small() {
        assert!(TorusGrid::new(7).is_err());
        assert!(TorusGrid::new(6).is_err());
        assert!(TorusGrid::new(9).is_err());
        assert!(TorusGrid::new(8).is_ok());
    }

    #[test]
    fn wavenumber_roundtrip() {
        let g = TorusGrid::new(16).unwrap();
        for i in 0..16 {
            assert_eq!(g.axis_index(g.wavenumber(i)), Some(i));
        }
        assert_eq!(g.wavenumber(8), 8);
        assert_eq!(g.wavenumber(9), -7);
        assert_eq!(g.axis_index(-8), None);
        assert_eq!(g.axis_index(9), None);
    }

    #[test]
    fn mirror_negates_mode() {
        let g = TorusGrid::new(12).unwrap();
        for f in 0..g.len() {
            if g.is_nyquist(f) {
                continue;
            }
            let (k1, k2) = g.mode(f);
            assert_eq!(g.mode(g.mirror(f)), (-k1, -k2));
        }
    }

    #[test]
    fn torus_metric_wraps() {
        let a = [0.01, 2.0 * PI - 0.01];
        let b = [2.0 * PI - 0.01, 0.01];
        assert!((torus_distance(a, b) - 0.02f64.hypot(0.02)).abs() < 1e-12);
        let d = torus_delta(a, b);
        assert!((d[0] + 0.02).abs() < 1e-12 && (d[1] - 0.02).abs() < 1e-12);
    }
}
