use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::TopologyConfig;
use super::critical::{find_critical_points, CriticalPoint, CriticalPointSet, PointKind};
use super::trace::{TraceEnd, Tracer};
use crate::error::Result;
use crate::fields::{
    stream_function, torus_delta, torus_distance, wrap, wrap_point, FieldEvaluator, ScalarEvaluator,
    SpectralField2D,
};
use crate::par;

/// A separatrix joining saddle `from` (along its unstable branch `branch`)
/// to saddle `to`, indices into the saddle list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaddleConnection {
    pub from: usize,
    pub branch: i8,
    pub to: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConnectionReport {
    pub hetero: usize,
    pub self_connections: usize,
    pub connections: Vec<SaddleConnection>,
    /// Separatrix traces that never came within the arrival radius of a
    /// saddle.
    pub non_connecting: usize,
    /// Arrivals rejected by the stream-function test.
    pub uncorroborated: usize,
}

/// Counts and connection structure of a field's phase portrait.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologySignature {
    pub n_saddles: usize,
    pub n_centers: usize,
    pub n_degenerate: usize,
    pub hetero_connections: usize,
    pub self_connections: usize,
    pub structurally_stable: bool,
}

impl TopologySignature {
    pub fn n_points(&self) -> usize {
        self.n_saddles + self.n_centers + self.n_degenerate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equivalence {
    Distinct,
    Indistinguishable,
}

/// One-sided inequivalence witness: `Distinct` only when an invariant
/// differs.
pub fn signatures_equivalent(a: &TopologySignature, b: &TopologySignature) -> Equivalence {
    let counts = (a.n_saddles, a.n_centers) != (b.n_saddles, b.n_centers);
    let stability = a.structurally_stable != b.structurally_stable
        && a.hetero_connections != b.hetero_connections;
    if counts || stability {
        Equivalence::Distinct
    } else {
        Equivalence::Indistinguishable
    }
}

/// Unit eigenvectors `(unstable, stable)` of a saddle Jacobian.
fn saddle_directions(j: &[[f64; 2]; 2]) -> ([f64; 2], [f64; 2]) {
    let half_tr = 0.5 * (j[0][0] + j[1][1]);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = (half_tr * half_tr - det).max(0.0).sqrt();
    let vec_for = |lam: f64| -> [f64; 2] {
        let a = [j[0][1], lam - j[0][0]];
        let b = [lam - j[1][1], j[1][0]];
        let v = if a[0].hypot(a[1]) >= b[0].hypot(b[1]) { a } else { b };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    };
    (vec_for(half_tr + disc), vec_for(half_tr - disc))
}

/// Bucket grid over the torus for nearest-saddle queries.
struct SaddleIndex {
    cells: usize,
    buckets: Vec<Vec<usize>>,
    positions: Vec<[f64; 2]>,
}

impl SaddleIndex {
    fn new(positions: Vec<[f64; 2]>, radius: f64) -> Self {
        let cells = ((2.0 * PI / radius).floor() as usize).clamp(1, 1024);
        let mut buckets = vec![Vec::new(); cells * cells];
        let idx = |x: f64| ((wrap(x) / (2.0 * PI) * cells as f64) as usize).min(cells - 1);
        for (i, p) in positions.iter().enumerate() {
            buckets[idx(p[0]) * cells + idx(p[1])].push(i);
        }
        Self {
            cells,
            buckets,
            positions,
        }
    }

    fn within(&self, x: [f64; 2], radius: f64) -> Option<usize> {
        let c = self.cells as i64;
        let idx = |v: f64| ((wrap(v) / (2.0 * PI) * c as f64) as i64).min(c - 1);
        let (a, b) = (idx(x[0]), idx(x[1]));
        for da in -1..=1 {
            for db in -1..=1 {
                let cell = ((a + da).rem_euclid(c) * c + (b + db).rem_euclid(c)) as usize;
                for &i in &self.buckets[cell] {
                    if torus_distance(self.positions[i], x) < radius {
                        return Some(i);
                    }
                }
            }
        }
        None
    }
}

struct Branch {
    origin: usize,
    sign: f64,
    unstable: bool,
}

enum BranchResult {
    Arrived { key: (usize, i8), target: usize },
    Open,
}

/// Trace the four separatrix branches of every saddle and record which
/// saddles they reach.
///
/// Unstable branches are traced forward, stable ones backward. A connection
/// is keyed by the saddle whose unstable branch it leaves from and that
/// branch's sign, so an orbit seen from both ends is counted once.
pub fn detect_saddle_connections(
    f: &SpectralField2D,
    saddles: &[CriticalPoint],
    cfg: &TopologyConfig,
) -> ConnectionReport {
    if saddles.is_empty() || f.is_zero() {
        return ConnectionReport::default();
    }
    let ev = FieldEvaluator::with_pruning(f, cfg.trace_prune_rel);
    let psi_fn = stream_function(f);
    let psi = psi_fn.evaluator();
    let psi_osc = oscillation(&psi, f.grid().resolution());
    let psi_tol = cfg.psi_tol_rel * psi_osc;
    let stop_tol = cfg.stop_tol_rel * ev.amplitude_bound();
    let tracer = Tracer {
        ev: &ev,
        h: cfg.trace_step,
        stop_tol,
    };
    let positions: Vec<[f64; 2]> = saddles.iter().map(|s| s.position).collect();
    let index = SaddleIndex::new(positions.clone(), cfg.arrival_radius);
    let dirs: Vec<([f64; 2], [f64; 2])> = saddles.iter().map(|s| saddle_directions(&s.jacobian)).collect();

    let mut branches = Vec::with_capacity(4 * saddles.len());
    for origin in 0..saddles.len() {
        for unstable in [true, false] {
            for sign in [1.0, -1.0] {
                branches.push(Branch {
                    origin,
                    sign,
                    unstable,
                });
            }
        }
    }

    let results = par::map(&branches, |br| {
        let (vu, vs) = dirs[br.origin];
        let v = if br.unstable { vu } else { vs };
        let p0 = positions[br.origin];
        let x0 = [p0[0] + cfg.eps_launch * br.sign * v[0], p0[1] + cfg.eps_launch * br.sign * v[1]];
        let mut left = false;
        let mut hit = None;
        let mut last = x0;
        let line = tracer.run(x0, if br.unstable { 1.0 } else { -1.0 }, cfg.max_arclength, false, |x, _| {
            last = x;
            if let Some(i) = index.within(x, cfg.arrival_radius) {
                if i != br.origin || left {
                    hit = Some(i);
                    return true;
                }
            } else if !left && torus_distance(wrap_point(x), p0) > 2.0 * cfg.arrival_radius {
                left = true;
            }
            false
        });
        match (line.end, hit) {
            (TraceEnd::Stopped, Some(target)) => {
                if (psi.value(p0) - psi.value(positions[target])).abs() >= psi_tol {
                    return Some(BranchResult::Open);
                }
                if br.unstable {
                    Some(BranchResult::Arrived {
                        key: (br.origin, br.sign as i8),
                        target,
                    })
                } else {
                    // backward arrival runs along the target's unstable branch
                    let d = torus_delta(positions[target], wrap_point(last));
                    let vu_t = dirs[target].0;
                    let s = if d[0] * vu_t[0] + d[1] * vu_t[1] >= 0.0 { 1 } else { -1 };
                    Some(BranchResult::Arrived {
                        key: (target, s),
                        target: br.origin,
                    })
                }
            }
            (TraceEnd::Stopped, None) => unreachable!("stop fires only on a hit"),
            _ => None,
        }
    });

    let mut found: BTreeMap<(usize, i8), usize> = BTreeMap::new();
    let mut report = ConnectionReport::default();
    for r in results {
        match r {
            Some(BranchResult::Arrived { key, target }) => {
                found.entry(key).or_insert(target);
            }
            Some(BranchResult::Open) => report.uncorroborated += 1,
            None => report.non_connecting += 1,
        }
    }
    for (&(from, branch), &to) in &found {
        if from == to {
            report.self_connections += 1;
        } else {
            report.hetero += 1;
        }
        report.connections.push(SaddleConnection { from, branch, to });
    }
    report
}

fn oscillation(psi: &ScalarEvaluator, m: usize) -> f64 {
    let s = (2 * m).max(64);
    let h = 2.0 * PI / s as f64;
    let vals = par::map_range(s * s, |i| psi.value([(i / s) as f64 * h, (i % s) as f64 * h]));
    let (lo, hi) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &v| (l.min(v), u.max(v)));
    hi - lo
}

/// Full topological analysis of one field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyAnalysis {
    pub critical: CriticalPointSet,
    pub connections: ConnectionReport,
    pub signature: TopologySignature,
}

pub fn analyze_topology(f: &SpectralField2D, cfg: &TopologyConfig) -> Result<TopologyAnalysis> {
    let critical = find_critical_points(f, cfg)?;
    let saddles = critical.saddles();
    let connections = detect_saddle_connections(f, &saddles, cfg);
    let n_degenerate = critical.count(PointKind::Degenerate);
    let signature = TopologySignature {
        n_saddles: saddles.len(),
        n_centers: critical.count(PointKind::Center),
        n_degenerate,
        hetero_connections: connections.hetero,
        self_connections: connections.self_connections,
        structurally_stable: n_degenerate == 0 && connections.hetero == 0,
    };
    Ok(TopologyAnalysis {
        critical,
        connections,
        signature,
    })
}

/// Structural-stability verdict with the signature behind it. The zero
/// field counts as unstable, with all counts zero.
pub fn is_structurally_stable(f: &SpectralField2D) -> Result<(bool, TopologySignature)> {
    is_structurally_stable_with(f, &TopologyConfig::default())
}

pub fn is_structurally_stable_with(f: &SpectralField2D, cfg: &TopologyConfig) -> Result<(bool, TopologySignature)> {
    if f.is_zero() {
        return Ok((false, TopologySignature::default()));
    }
    let a = analyze_topology(f, cfg)?;
    Ok((a.signature.structurally_stable, a.signature))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_taylor, make_tilde_t1, TaylorSpec, TorusGrid};

    fn grid() -> TorusGrid {
        TorusGrid::new(16).unwrap()
    }

    #[test]
    fn t11_is_unstable() {
        let f = make_taylor(TaylorSpec::new(1, 1).unwrap(), 1.0, grid()).unwrap();
        let a = analyze_topology(&f, &TopologyConfig::default()).unwrap();
        assert_eq!(a.signature.n_saddles, 4);
        assert_eq!(a.signature.hetero_connections, 8);
        assert!(!a.signature.structurally_stable);
    }

    #[test]
    fn tilde_t1_is_stable() {
        let f = make_tilde_t1(grid()).unwrap();
        let (stable, sig) = is_structurally_stable(&f).unwrap();
        assert!(stable);
        assert_eq!((sig.n_saddles, sig.n_centers, sig.hetero_connections), (2, 2, 0));
    }

    #[test]
    fn zero_field_convention() {
        let (stable, sig) = is_structurally_stable(&SpectralField2D::zeros(grid())).unwrap();
        assert!(!stable);
        assert_eq!(sig, TopologySignature::default());
        let r = detect_saddle_connections(&SpectralField2D::zeros(grid()), &[], &TopologyConfig::default());
        assert_eq!((r.hetero, r.self_connections), (0, 0));
    }

    #[test]
    fn signature_comparison() {
        let a = TopologySignature {
            n_saddles: 4,
            n_centers: 4,
            hetero_connections: 8,
            ..Default::default()
        };
        let b = TopologySignature {
            n_saddles: 2,
            n_centers: 2,
            structurally_stable: true,
            ..Default::default()
        };
        assert_eq!(signatures_equivalent(&a, &b), Equivalence::Distinct);
        assert_eq!(signatures_equivalent(&b, &a), Equivalence::Distinct);
        assert_eq!(signatures_equivalent(&a, &a), Equivalence::Indistinguishable);
        assert_eq!(signatures_equivalent(&b, &b.clone()), Equivalence::Indistinguishable);
    }

    #[test]
    fn saddle_eigenvectors() {
        let (u, s) = saddle_directions(&[[0.0, 1.0], [0.5, 0.0]]);
        // J u = sqrt(1/2) u
        let l = 0.5f64.sqrt();
        assert!((u[1] - l * u[0]).abs() < 1e-15 && (0.5 * u[0] - l * u[1]).abs() < 1e-15);
        assert!((s[1] + l * s[0]).abs() < 1e-15);
    }
}
