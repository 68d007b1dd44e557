use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::{ForceTarget, ForcingSpec, SimConfig};
use super::rhs::NonlinearTerm;
use super::sink::StateSink;
use super::state::MHDState;
use crate::error::{Error, Result};
use crate::fields::{
    leray_project, leray_project_in_place, SpectralField2D, TorusGrid, VectorSpectrum,
};
use crate::oracles::ForcedOracle;
use crate::par;

const U: usize = 0;
const B: usize = 1;

#[derive(Clone, Debug)]
enum TimeFactor {
    Constant(f64),
    /// Velocity force cancelling the cross term of the forced closed form.
    CrossCompensation(ForcedOracle),
}

impl TimeFactor {
    fn at(&self, t: f64) -> f64 {
        match self {
            TimeFactor::Constant(a) => *a,
            TimeFactor::CrossCompensation(o) => o.velocity_force_factor(t),
        }
    }
}

/// A force `factor(t) * shape` with a Leray-projected spatial shape.
#[derive(Clone, Debug)]
struct CompiledForce {
    target: usize,
    shape: VectorSpectrum,
    factor: TimeFactor,
}

#[derive(Clone, Debug)]
struct Factors {
    dt: f64,
    half: [Vec<f64>; 2],
    full: [Vec<f64>; 2],
}

type Pair = [VectorSpectrum; 2];

/// Integrating-factor RK4 stepper bound to one configuration.
///
/// With `L = -nu |k|^2` for `u` and `-eta |k|^2` for `b`, the scheme is RK4
/// applied to `v = e^{-L t} y`, so the diffusion semigroup is exact and
/// only the nonlinearity and forcing carry truncation error.
#[derive(Clone, Debug)]
pub struct Integrator {
    grid: TorusGrid,
    nu: f64,
    eta: f64,
    k2: Vec<f64>,
    nonlinear: NonlinearTerm,
    forces: Vec<CompiledForce>,
    factors: Option<Factors>,
    cfl_warned: bool,
    last_max_velocity: f64,
}

impl Integrator {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        Ok(Self {
            grid,
            nu: cfg.nu,
            eta: cfg.eta,
            k2: grid.k_squared(),
            nonlinear: NonlinearTerm::new(grid, cfg.dealias),
            forces: compile_forcing(&cfg.forcing, cfg.eta, grid)?,
            factors: None,
            cfl_warned: false,
            last_max_velocity: 0.0,
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// Largest grid velocity seen at the first stage of the last step.
    pub fn last_max_velocity(&self) -> f64 {
        self.last_max_velocity
    }

    /// Advance `state` by `dt` in place. On blow-up the state is left
    /// untouched.
    pub fn step_with(&mut self, state: &mut MHDState, dt: f64) -> Result<()> {
        if state.grid() != self.grid {
            return Err(Error::Input(format!(
                "state resolution {} differs from configured {}",
                state.grid().resolution(),
                self.grid.resolution()
            )));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Input(format!("step size must be finite and > 0, got {dt}")));
        }
        self.ensure_factors(dt);
        let fac = self.factors.as_ref().expect("factors just set");
        let (eh, ef) = (&fac.half, &fac.full);
        let t = state.t;
        let h = 0.5 * dt;
        let y: Pair = [state.u.spectrum().clone(), state.b.spectrum().clone()];

        let (k1, vmax) = self.tendency(&y, t);
        self.last_max_velocity = vmax;
        let a = build(self.grid, |w, c, j| eh[w][j] * (y[w].component(c)[j] + h * k1[w].component(c)[j]));
        let (k2, _) = self.tendency(&a, t + h);
        let a = build(self.grid, |w, c, j| eh[w][j] * y[w].component(c)[j] + h * k2[w].component(c)[j]);
        let (k3, _) = self.tendency(&a, t + h);
        let a = build(self.grid, |w, c, j| {
            ef[w][j] * y[w].component(c)[j] + dt * eh[w][j] * k3[w].component(c)[j]
        });
        let (k4, _) = self.tendency(&a, t + dt);
        let sixth = dt / 6.0;
        let mut next = build(self.grid, |w, c, j| {
            ef[w][j] * (y[w].component(c)[j] + sixth * k1[w].component(c)[j])
                + sixth
                    * (2.0 * eh[w][j] * (k2[w].component(c)[j] + k3[w].component(c)[j])
                        + k4[w].component(c)[j])
        });

        let cfl = dt * vmax * self.grid.resolution() as f64 / (2.0 * PI);
        if cfl >= 0.5 && !self.cfl_warned {
            log::warn!("CFL number {cfl:.3} >= 0.5 at t = {t}; consider a smaller dt");
            self.cfl_warned = true;
        }

        for s in next.iter_mut() {
            s.symmetrize();
            leray_project_in_place(s);
        }
        let [u, b] = next;
        let u = SpectralField2D::from_spectrum_unchecked(u);
        let b = SpectralField2D::from_spectrum_unchecked(b);
        if u.has_non_finite() || b.has_non_finite() {
            return Err(Error::BlowUp { time: t + dt });
        }
        state.u = u;
        state.b = b;
        state.t = t + dt;
        Ok(())
    }

    fn ensure_factors(&mut self, dt: f64) {
        if self.factors.as_ref().is_some_and(|f| f.dt == dt) {
            return;
        }
        let decay = |c: f64, s: f64| -> Vec<f64> { self.k2.iter().map(|k| (-c * k * s).exp()).collect() };
        self.factors = Some(Factors {
            dt,
            half: [decay(self.nu, 0.5 * dt), decay(self.eta, 0.5 * dt)],
            full: [decay(self.nu, dt), decay(self.eta, dt)],
        });
    }

    fn tendency(&self, y: &Pair, t: f64) -> (Pair, f64) {
        let out = self.nonlinear.evaluate_spectra(&y[U], &y[B]);
        let mut k = [out.du, out.db];
        for f in &self.forces {
            k[f.target].axpy(f.factor.at(t), &f.shape);
        }
        (k, out.max_velocity)
    }
}

fn build<F>(grid: TorusGrid, f: F) -> Pair
where
    F: Fn(usize, usize, usize) -> Complex64 + Sync + Send,
{
    let m = grid.resolution();
    let mut out = [VectorSpectrum::zeros(grid), VectorSpectrum::zeros(grid)];
    for (w, s) in out.iter_mut().enumerate() {
        for c in 0..2 {
            par::for_each_chunk_mut(s.component_mut(c), m, |row, chunk| {
                let base = row * m;
                for (o, v) in chunk.iter_mut().enumerate() {
                    *v = f(w, c, base + o);
                }
            });
        }
    }
    out
}

fn compile_forcing(spec: &ForcingSpec, eta: f64, grid: TorusGrid) -> Result<Vec<CompiledForce>> {
    let crossed = |o: ForcedOracle| -> Vec<CompiledForce> {
        vec![
            CompiledForce {
                target: B,
                shape: o.target_field().into_spectrum(),
                factor: TimeFactor::Constant(1.0),
            },
            CompiledForce {
                target: U,
                shape: leray_project(o.cross_term()).into_spectrum(),
                factor: TimeFactor::CrossCompensation(o),
            },
        ]
    };
    Ok(match spec {
        ForcingSpec::None => Vec::new(),
        ForcingSpec::Theorem2 { nm, n2 } => crossed(ForcedOracle::theorem2(*nm, *n2, eta, grid)?),
        ForcingSpec::Remark2 { nm } => crossed(ForcedOracle::remark2(*nm, eta, grid)?),
        ForcingSpec::CustomTaylorList { terms } => terms
            .iter()
            .map(|t| {
                Ok(CompiledForce {
                    target: match t.target {
                        ForceTarget::U => U,
                        ForceTarget::B => B,
                    },
                    shape: t.mode.field(t.amplitude, grid)?.into_spectrum(),
                    factor: TimeFactor::Constant(1.0),
                })
            })
            .collect::<Result<_>>()?,
    })
}

/// One step of size `cfg.dt` from `state`.
pub fn step(state: &MHDState, cfg: &SimConfig) -> Result<MHDState> {
    let mut next = state.clone();
    Integrator::new(cfg)?.step_with(&mut next, cfg.dt)?;
    Ok(next)
}

/// Advance `initial` to `cfg.t_end`, shortening the last step to land on it
/// exactly. Each sink observes step 0, every multiple of its cadence and
/// the final step; `finish` receives the last finite state, also when a
/// blow-up aborts the run.
pub fn simulate(cfg: &SimConfig, initial: MHDState, sinks: &mut [&mut dyn StateSink]) -> Result<MHDState> {
    let mut integ = Integrator::new(cfg)?;
    let t0 = initial.t;
    let span = cfg.t_end - t0;
    let steps = if span > 0.0 {
        ((span / cfg.dt) - 1e-9).ceil().max(1.0) as usize
    } else {
        0
    };
    let cadences: Vec<usize> = sinks
        .iter()
        .map(|s| s.cadence().unwrap_or(cfg.output_cadence).max(1))
        .collect();
    let mut state = initial;
    for s in sinks.iter_mut() {
        s.observe(0, &state)?;
    }
    for k in 1..=steps {
        let target = if k == steps { cfg.t_end } else { t0 + k as f64 * cfg.dt };
        let dt = target - state.t;
        if let Err(e) = integ.step_with(&mut state, dt) {
            for s in sinks.iter_mut() {
                s.finish(&state)?;
            }
            return Err(e);
        }
        state.t = target;
        for (s, &c) in sinks.iter_mut().zip(&cadences) {
            if k % c == 0 || k == steps {
                s.observe(k, &state)?;
            }
        }
    }
    for s in sinks.iter_mut() {
        s.finish(&state)?;
    }
    Ok(state)
}

/// `e^{eta t Lap} f`.
pub fn heat_propagate(f: &SpectralField2D, eta: f64, t: f64) -> SpectralField2D {
    f.apply_radial(|k2| (-eta * k2 * t).exp())
}

/// `D(t) = b(t) - e^{eta t Lap} b(0)` for each state of a trajectory that
/// starts at `t = 0`.
pub fn duhamel_remainder(trajectory: &[MHDState], eta: f64) -> Result<Vec<(f64, SpectralField2D)>> {
    let b0 = match trajectory.first() {
        Some(s) if s.t == 0.0 => &s.b,
        _ => return Err(Error::Input("trajectory has no t = 0 state".into())),
    };
    Ok(trajectory
        .iter()
        .map(|s| (s.t, s.b.sub(&heat_propagate(b0, eta, s.t))))
        .collect())
}
