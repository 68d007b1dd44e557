use serde::{Deserialize, Serialize};

use super::config::TopologyConfig;
use crate::error::{Error, Result};
use crate::fields::{
    c1_norm, pad_spectrum, torus_distance, wrap_point, Fft2, FieldEvaluator, SpectralField2D,
};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointKind {
    Saddle,
    Center,
    Degenerate,
}

/// Refined zero of a field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub position: [f64; 2],
    /// `J[i][j] = d f_i / d x_j`.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    pub kind: PointKind,
    pub residual: f64,
}

/// A seed cell whose Newton iteration did not converge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedFailure {
    pub seed: [f64; 2],
    pub last_position: [f64; 2],
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointSet {
    pub points: Vec<CriticalPoint>,
    pub failures: Vec<SeedFailure>,
    pub c1_norm: f64,
    pub deg_tol: f64,
    pub seeds: usize,
}

impl CriticalPointSet {
    pub fn count(&self, kind: PointKind) -> usize {
        self.points.iter().filter(|p| p.kind == kind).count()
    }

    pub fn saddles(&self) -> Vec<CriticalPoint> {
        self.points
            .iter()
            .copied()
            .filter(|p| p.kind == PointKind::Saddle)
            .collect()
    }
}

pub fn det2(j: &[[f64; 2]; 2]) -> f64 {
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Sign-of-determinant rule with degenerate band `|det| <= deg_tol`.
pub fn classify(j: &[[f64; 2]; 2], deg_tol: f64) -> PointKind {
    let d = det2(j);
    if d < -deg_tol {
        PointKind::Saddle
    } else if d > deg_tol {
        PointKind::Center
    } else {
        PointKind::Degenerate
    }
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Values of `f` on an `s x s` node grid, x index slow.
fn sample_values(f: &SpectralField2D, s: usize) -> (Vec<f64>, Vec<f64>) {
    let grid = f.grid();
    if s >= grid.resolution() {
        let fft = Fft2::new(s);
        fft.to_grid_pair(
            &pad_spectrum(grid, f.component(0), s),
            &pad_spectrum(grid, f.component(1), s),
        )
    } else {
        let ev = FieldEvaluator::new(f);
        let h = 2.0 * std::f64::consts::PI / s as f64;
        let v = par::map_range(s * s, |i| ev.value([(i / s) as f64 * h, (i % s) as f64 * h]));
        v.into_iter().map(|p| (p[0], p[1])).unzip()
    }
}

fn straddles(vals: [f64; 4]) -> bool {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

enum NewtonOutcome {
    Converged([f64; 2]),
    Failed([f64; 2], f64),
}

fn newton(ev: &FieldEvaluator, x0: [f64; 2], tol: f64, max_iter: usize) -> NewtonOutcome {
    let mut x = x0;
    let mut s = ev.sample(x);
    let mut r = norm(s.value);
    let mut converged = r <= tol;
    for _ in 0..max_iter {
        if converged {
            break;
        }
        let j = s.jacobian;
        let d = det2(&j);
        if d == 0.0 || !d.is_finite() {
            return NewtonOutcome::Failed(wrap_point(x), r);
        }
        let f = s.value;
        let dx = [
            -(j[1][1] * f[0] - j[0][1] * f[1]) / d,
            -(-j[1][0] * f[0] + j[0][0] * f[1]) / d,
        ];
        let mut lam = 1.0;
        loop {
            let xn = [x[0] + lam * dx[0], x[1] + lam * dx[1]];
            let sn = ev.sample(xn);
            let rn = norm(sn.value);
            if rn < r || lam < 1.0 / 1024.0 {
                x = xn;
                s = sn;
                r = rn;
                break;
            }
            lam *= 0.5;
        }
        converged = r <= tol;
    }
    if !converged {
        return NewtonOutcome::Failed(wrap_point(x), r);
    }
    // polish while the residual keeps dropping
    for _ in 0..3 {
        let j = s.jacobian;
        let d = det2(&j);
        if d == 0.0 {
            break;
        }
        let f = s.value;
        let xn = [
            x[0] - (j[1][1] * f[0] - j[0][1] * f[1]) / d,
            x[1] - (-j[1][0] * f[0] + j[0][0] * f[1]) / d,
        ];
        let sn = ev.sample(xn);
        let rn = norm(sn.value);
        if rn >= r {
            break;
        }
        x = xn;
        s = sn;
        r = rn;
    }
    NewtonOutcome::Converged(wrap_point(x))
}

/// Locate and classify the zeros of `f`.
///
/// Every cell of the seed grid on which both components take both signs
/// (zero included) seeds a damped Newton iteration; converged zeros are
/// merged within `dedup_radius`. Non-converging seeds are returned as
/// diagnostics.
pub fn find_critical_points(f: &SpectralField2D, cfg: &TopologyConfig) -> Result<CriticalPointSet> {
    cfg.validate()?;
    if f.is_zero() {
        return Err(Error::Input("critical-point search on the zero field".into()));
    }
    let c1 = c1_norm(f, cfg.c1_oversample);
    let deg_tol = cfg.deg_tol_rel * c1 * c1;
    let tol = cfg.newton_tol * c1;
    let s = cfg.seed_grid.unwrap_or(2 * f.grid().resolution());
    let (v1, v2) = sample_values(f, s);
    let h = 2.0 * std::f64::consts::PI / s as f64;
    let seeds: Vec<[f64; 2]> = (0..s * s)
        .filter(|&i| {
            let (a, b) = (i / s, i % s);
            let idx = [
                a * s + b,
                ((a + 1) % s) * s + b,
                a * s + (b + 1) % s,
                ((a + 1) % s) * s + (b + 1) % s,
            ];
            straddles(idx.map(|k| v1[k])) && straddles(idx.map(|k| v2[k]))
        })
        .map(|i| [((i / s) as f64 + 0.5) * h, ((i % s) as f64 + 0.5) * h])
        .collect();

    let ev = FieldEvaluator::with_pruning(f, cfg.prune_rel);
    let outcomes = par::map(&seeds, |&x0| newton(&ev, x0, tol, cfg.max_iter));

    let exact = FieldEvaluator::new(f);
    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut failures = Vec::new();
    for (seed, out) in seeds.iter().zip(outcomes) {
        match out {
            NewtonOutcome::Converged(x) => {
                if points
                    .iter()
                    .any(|p| torus_distance(p.position, x) < cfg.dedup_radius)
                {
                    continue;
                }
                let smp = exact.sample(x);
                let j = smp.jacobian;
                points.push(CriticalPoint {
                    position: x,
                    jacobian: j,
                    det: det2(&j),
                    kind: classify(&j, deg_tol),
                    residual: norm(smp.value),
                });
            }
            NewtonOutcome::Failed(x, r) => failures.push(SeedFailure {
                seed: *seed,
                last_position: x,
                residual: r,
            }),
        }
    }
    points.sort_by(|a, b| {
        a.position[0]
            .total_cmp(&b.position[0])
            .then(a.position[1].total_cmp(&b.position[1]))
    });
    Ok(CriticalPointSet {
        points,
        failures,
        c1_norm: c1,
        deg_tol,
        seeds: seeds.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_taylor, make_tilde_t1, TaylorSpec, TorusGrid};
    use std::f64::consts::PI;

    fn near(set: &CriticalPointSet, p: [f64; 2], kind: PointKind) -> bool {
        set.points
            .iter()
            .any(|c| torus_distance(c.position, p) < 1e-8 && c.kind == kind)
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&[[0.0, 1.0], [0.5, 0.0]], 1e-12), PointKind::Saddle);
        assert_eq!(classify(&[[0.0, -1.0], [0.5, 0.0]], 1e-12), PointKind::Center);
        assert_eq!(classify(&[[0.0, 0.0], [0.0, 0.0]], 1e-12), PointKind::Degenerate);
    }

    #[test]
    fn tilde_t1_points() {
        let f = make_tilde_t1(TorusGrid::new(16).unwrap()).unwrap();
        let set = find_critical_points(&f, &TopologyConfig::default()).unwrap();
        assert_eq!(set.points.len(), 4);
        assert!(near(&set, [0.0, 0.0], PointKind::Saddle));
        assert!(near(&set, [PI, PI], PointKind::Saddle));
        assert!(near(&set, [0.0, PI], PointKind::Center));
        assert!(near(&set, [PI, 0.0], PointKind::Center));
    }

    #[test]
    fn t11_points() {
        let f = make_taylor(TaylorSpec::new(1, 1).unwrap(), 1.0, TorusGrid::new(16).unwrap()).unwrap();
        let set = find_critical_points(&f, &TopologyConfig::default()).unwrap();
        assert_eq!(set.points.len(), 8);
        let h = PI / 2.0;
        for p in [[0.0, h], [0.0, 3.0 * h], [PI, h], [PI, 3.0 * h]] {
            assert!(near(&set, p, PointKind::Saddle), "{p:?}");
        }
        for p in [[h, 0.0], [3.0 * h, 0.0], [h, PI], [3.0 * h, PI]] {
            assert!(near(&set, p, PointKind::Center), "{p:?}");
        }
        assert!(set.failures.is_empty());
    }

    #[test]
    fn taylor_counts_up_to_four() {
        let grid = TorusGrid::new(16).unwrap();
        for n in 1..=4 {
            for m in 1..=4 {
                let f = make_taylor(TaylorSpec::new(n, m).unwrap(), 1.0, grid).unwrap();
                let set = find_critical_points(&f, &TopologyConfig::default()).unwrap();
                let nm = (n * m) as usize;
                assert_eq!(set.points.len(), 8 * nm, "({n},{m})");
                assert_eq!(set.count(PointKind::Saddle), 4 * nm);
                assert_eq!(set.count(PointKind::Center), 4 * nm);
                for p in &set.points {
                    assert!(p.residual < 1e-10 * set.c1_norm);
                    let tr = p.jacobian[0][0] + p.jacobian[1][1];
                    let jn = p.jacobian.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
                    assert!(tr.abs() < 1e-8 * jn);
                }
            }
        }
    }

    #[test]
    fn perturbed_t44_keeps_its_points() {
        let grid = TorusGrid::new(32).unwrap();
        let t44 = make_taylor(TaylorSpec::new(4, 4).unwrap(), 1.0, grid).unwrap();
        let pert = make_tilde_t1(grid).unwrap();
        for d in [1e-5, 1e-4, 1e-3] {
            let f = t44.combine(1.0, &pert, d);
            let set = find_critical_points(&f, &TopologyConfig::default()).unwrap();
            let nondeg = set.points.iter().filter(|p| p.kind != PointKind::Degenerate).count();
            assert!(nondeg >= 128, "delta {d}: {nondeg}");
            assert_eq!(set.count(PointKind::Saddle), set.count(PointKind::Center));
        }
    }

    #[test]
    fn zero_field_is_rejected() {
        let f = SpectralField2D::zeros(TorusGrid::new(8).unwrap());
        assert!(find_critical_points(&f, &TopologyConfig::default()).is_err());
    }
}
