use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{c1_norm, wrap_point, FieldEvaluator, PointSample, SpectralField2D, C1_OVERSAMPLE};
use crate::par;
use crate::solver::{MHDState, SimConfig};

/// Images and deformation gradients of seeds under a flow map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowMapSample {
    pub seeds: Vec<[f64; 2]>,
    /// Unwrapped images `Phi_t(seed)`.
    pub images: Vec<[f64; 2]>,
    /// `grad Phi_t(seed)`, `J[i][j] = d Phi_i / d x_j`.
    pub jacobians: Vec<[[f64; 2]; 2]>,
}

impl FlowMapSample {
    pub fn max_det_defect(&self) -> f64 {
        self.jacobians
            .iter()
            .map(|j| (j[0][0] * j[1][1] - j[0][1] * j[1][0] - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Velocity snapshots at uniform times, interpolated by cubic Lagrange
/// polynomials in time.
pub struct VelocityHistory {
    t0: f64,
    interval: f64,
    evals: Vec<FieldEvaluator>,
}

impl VelocityHistory {
    pub fn new(t0: f64, interval: f64, fields: &[SpectralField2D]) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::Input("velocity history is empty".into()));
        }
        if fields.len() > 1 && !(interval > 0.0) {
            return Err(Error::Input("snapshot interval must be > 0".into()));
        }
        Ok(Self {
            t0,
            interval,
            evals: par::map(fields, |f| FieldEvaluator::new(f)),
        })
    }

    /// Snapshots of `u` from a recorded trajectory with uniform spacing.
    pub fn from_states(states: &[MHDState]) -> Result<Self> {
        let t0 = states
            .first()
            .ok_or_else(|| Error::Input("trajectory is empty".into()))?
            .t;
        let interval = if states.len() > 1 { states[1].t - states[0].t } else { 0.0 };
        for (i, s) in states.iter().enumerate() {
            let want = t0 + i as f64 * interval;
            if (s.t - want).abs() > 1e-9 * interval.max(1e-300) {
                return Err(Error::Input(format!(
                    "snapshot {i} at t = {} breaks the uniform cadence {interval}",
                    s.t
                )));
            }
        }
        let us: Vec<SpectralField2D> = states.iter().map(|s| s.u.clone()).collect();
        Self::new(t0, interval, &us)
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t0 + (self.evals.len() - 1) as f64 * self.interval
    }

    fn sample(&self, x: [f64; 2], t: f64) -> PointSample {
        let n = self.evals.len();
        if n == 1 {
            return self.evals[0].sample(x);
        }
        let r = (t - self.t0) / self.interval;
        let k = r.round();
        if (r - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < n {
            return self.evals[k as usize].sample(x);
        }
        let width = n.min(4);
        let start = (r.floor() as i64 - 1).clamp(0, (n - width) as i64) as usize;
        let mut out = PointSample {
            value: [0.0; 2],
            jacobian: [[0.0; 2]; 2],
        };
        for a in start..start + width {
            let mut w = 1.0;
            for b in start..start + width {
                if b != a {
                    w *= (r - b as f64) / (a as f64 - b as f64);
                }
            }
            let s = self.evals[a].sample(x);
            for i in 0..2 {
                out.value[i] += w * s.value[i];
                for j in 0..2 {
                    out.jacobian[i][j] += w * s.jacobian[i][j];
                }
            }
        }
        out
    }
}

type FlowState = ([f64; 2], [[f64; 2]; 2]);

fn flow_rhs(s: &PointSample, f: &[[f64; 2]; 2]) -> FlowState {
    let j = s.jacobian;
    let mut df = [[0.0; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            df[i][k] = j[i][0] * f[0][k] + j[i][1] * f[1][k];
        }
    }
    (s.value, df)
}

fn axpy(y: &FlowState, a: f64, k: &FlowState) -> FlowState {
    let mut out = *y;
    for i in 0..2 {
        out.0[i] += a * k.0[i];
        for j in 0..2 {
            out.1[i][j] += a * k.1[i][j];
        }
    }
    out
}

fn rk4_flow(sample: &impl Fn([f64; 2], f64) -> PointSample, y: FlowState, t: f64, h: f64) -> FlowState {
    let k1 = flow_rhs(&sample(y.0, t), &y.1);
    let y2 = axpy(&y, 0.5 * h, &k1);
    let k2 = flow_rhs(&sample(y2.0, t + 0.5 * h), &y2.1);
    let y3 = axpy(&y, 0.5 * h, &k2);
    let k3 = flow_rhs(&sample(y3.0, t + 0.5 * h), &y3.1);
    let y4 = axpy(&y, h, &k3);
    let k4 = flow_rhs(&sample(y4.0, t + h), &y4.1);
    let mut out = y;
    for i in 0..2 {
        out.0[i] += h / 6.0 * (k1.0[i] + 2.0 * (k2.0[i] + k3.0[i]) + k4.0[i]);
        for j in 0..2 {
            out.1[i][j] += h / 6.0 * (k1.1[i][j] + 2.0 * (k2.1[i][j] + k3.1[i][j]) + k4.1[i][j]);
        }
    }
    out
}

fn integrate(sample: impl Fn([f64; 2], f64) -> PointSample + Sync, seeds: &[[f64; 2]], t0: f64, t: f64, h: f64) -> FlowMapSample {
    let steps = if t > 0.0 { ((t / h) - 1e-9).ceil().max(1.0) as usize } else { 0 };
    let out = par::map(seeds, |&x| {
        let mut y: FlowState = (x, [[1.0, 0.0], [0.0, 1.0]]);
        for k in 0..steps {
            let a = t0 + k as f64 * h;
            let b = if k + 1 == steps { t0 + t } else { t0 + (k + 1) as f64 * h };
            y = rk4_flow(&sample, y, a, b - a);
        }
        y
    });
    FlowMapSample {
        seeds: seeds.to_vec(),
        images: out.iter().map(|y| y.0).collect(),
        jacobians: out.iter().map(|y| y.1).collect(),
    }
}

/// `Phi_t` and `grad Phi_t` of the flow of the recorded velocity, starting
/// at the first snapshot. Steps span two snapshot intervals, so every RK
/// stage lands on a snapshot except in a final partial step.
pub fn flow_map(history: &VelocityHistory, seeds: &[[f64; 2]], t: f64) -> Result<FlowMapSample> {
    if t < 0.0 {
        return Err(Error::Input(format!("flow time must be >= 0, got {t}")));
    }
    if t > 0.0 && history.start() + t > history.end() + 1e-9 * history.interval.max(1e-300) {
        return Err(Error::Input(format!(
            "velocity snapshots cover [{}, {}], flow needs up to {}",
            history.start(),
            history.end(),
            history.start() + t
        )));
    }
    let h = 2.0 * history.interval;
    Ok(integrate(|x, s| history.sample(x, s), seeds, history.start(), t, h))
}

/// Flow of a time-independent velocity with RK4 step `h`.
pub fn steady_flow_map(u: &SpectralField2D, seeds: &[[f64; 2]], t: f64, h: f64) -> FlowMapSample {
    let ev = FieldEvaluator::new(u);
    integrate(|x, _| ev.sample(x), seeds, 0.0, t, h)
}

/// Largest frozen-in defect `|b(t, Phi_t x) - grad Phi_t(x) b0(x)|` over the
/// seeds, relative to the C^1 norm of `b0`. The trajectory must come from an
/// ideal (`eta = 0`) run, start at its first state and contain a state at
/// time `t` past that start.
pub fn verify_frozen_in(cfg: &SimConfig, states: &[MHDState], seeds: &[[f64; 2]], t: f64) -> Result<f64> {
    if cfg.eta > 0.0 {
        return Err(Error::Misuse(format!(
            "frozen-in check needs an ideal run, got eta = {}",
            cfg.eta
        )));
    }
    let history = VelocityHistory::from_states(states)?;
    let start = history.start();
    let target = states
        .iter()
        .find(|s| (s.t - (start + t)).abs() <= 1e-9 * t.max(1.0))
        .ok_or_else(|| Error::Input(format!("no recorded state at t = {}", start + t)))?;
    let b0 = &states[0].b;
    let scale = c1_norm(b0, C1_OVERSAMPLE);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let flow = flow_map(&history, seeds, t)?;
    let e0 = FieldEvaluator::new(b0);
    let et = FieldEvaluator::new(&target.b);
    let mut worst: f64 = 0.0;
    for ((x, y), f) in seeds.iter().zip(&flow.images).zip(&flow.jacobians) {
        let b0x = e0.value(*x);
        let pushed = [
            f[0][0] * b0x[0] + f[0][1] * b0x[1],
            f[1][0] * b0x[0] + f[1][1] * b0x[1],
        ];
        let bt = et.value(wrap_point(*y));
        worst = worst.max((bt[0] - pushed[0]).hypot(bt[1] - pushed[1]));
    }
    Ok(worst / scale)
}

/// `k x k` lattice of seeds at cell centres.
pub fn seed_lattice(k: usize) -> Vec<[f64; 2]> {
    let h = 2.0 * std::f64::consts::PI / k as f64;
    (0..k * k)
        .map(|i| [((i / k) as f64 + 0.5) * h, ((i % k) as f64 + 0.5) * h])
        .collect()
}
