use serde::{Deserialize, Serialize};

use super::config::TopologyConfig;
use crate::error::{Error, Result};
use crate::fields::{wrap_point, FieldEvaluator, SpectralField2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceEnd {
    /// Full requested arclength covered.
    Arclength,
    /// `|f|` fell below the stop tolerance.
    NearCritical,
    /// A caller-supplied stop condition fired.
    Stopped,
}

/// Polyline of an integral line, unwrapped (continuous across the periodic
/// boundary; wrap each point to get torus coordinates).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralLine {
    pub points: Vec<[f64; 2]>,
    pub arclength: f64,
    pub end: TraceEnd,
}

impl IntegralLine {
    pub fn start(&self) -> [f64; 2] {
        self.points[0]
    }

    pub fn end_point(&self) -> [f64; 2] {
        *self.points.last().expect("a line has at least its seed")
    }
}

/// RK4 integrator of `dx/ds = sign * f(x) / |f(x)|`.
pub(crate) struct Tracer<'a> {
    pub ev: &'a FieldEvaluator,
    pub h: f64,
    pub stop_tol: f64,
}

impl Tracer<'_> {
    fn dir(&self, x: [f64; 2], sign: f64) -> Option<[f64; 2]> {
        let v = self.ev.value(x);
        let n = v[0].hypot(v[1]);
        if n < self.stop_tol {
            return None;
        }
        Some([sign * v[0] / n, sign * v[1] / n])
    }

    fn rk4(&self, x: [f64; 2], h: f64, sign: f64) -> Option<[f64; 2]> {
        let k1 = self.dir(x, sign)?;
        let k2 = self.dir([x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]], sign)?;
        let k3 = self.dir([x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]], sign)?;
        let k4 = self.dir([x[0] + h * k3[0], x[1] + h * k3[1]], sign)?;
        Some([
            x[0] + h / 6.0 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0]),
            x[1] + h / 6.0 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1]),
        ])
    }

    /// Trace from `x0` for at most `length`; `stop` sees each new unwrapped
    /// point and the arclength so far. Only the endpoints are kept unless
    /// `record` is set.
    pub fn run(
        &self,
        x0: [f64; 2],
        sign: f64,
        length: f64,
        record: bool,
        mut stop: impl FnMut([f64; 2], f64) -> bool,
    ) -> IntegralLine {
        let mut x = x0;
        let mut s = 0.0;
        let mut points = vec![x0];
        let end = loop {
            if s >= length {
                break TraceEnd::Arclength;
            }
            let h = self.h.min(length - s);
            match self.rk4(x, h, sign) {
                None => break TraceEnd::NearCritical,
                Some(xn) => {
                    x = xn;
                    s += h;
                    if record {
                        points.push(x);
                    }
                    if stop(x, s) {
                        break TraceEnd::Stopped;
                    }
                }
            }
        };
        if !record && points.len() == 1 && x != x0 {
            points.push(x);
        }
        IntegralLine {
            points,
            arclength: s,
            end,
        }
    }
}

/// Field line of `f` through `x0` over arclength `arclen` with RK4 step
/// `h`, stopping early next to a zero of `f`.
pub fn trace_integral_line(f: &SpectralField2D, x0: [f64; 2], arclen: f64, h: f64) -> Result<IntegralLine> {
    trace_integral_line_with(f, x0, arclen, h, false, &TopologyConfig::default())
}

/// As [`trace_integral_line`], optionally against the field direction.
pub fn trace_integral_line_with(
    f: &SpectralField2D,
    x0: [f64; 2],
    arclen: f64,
    h: f64,
    backward: bool,
    cfg: &TopologyConfig,
) -> Result<IntegralLine> {
    if !(h > 0.0 && arclen >= 0.0) {
        return Err(Error::Input(format!("trace needs h > 0 and arclen >= 0, got {h}, {arclen}")));
    }
    let ev = FieldEvaluator::new(f);
    let stop_tol = cfg.stop_tol_rel * ev.amplitude_bound();
    let v = ev.value(wrap_point(x0));
    if v[0].hypot(v[1]) < stop_tol || ev.active_modes() == 0 {
        return Err(Error::Input(format!(
            "trace seed ({}, {}) sits at a critical point",
            x0[0], x0[1]
        )));
    }
    let tracer = Tracer { ev: &ev, h, stop_tol };
    let sign = if backward { -1.0 } else { 1.0 };
    Ok(tracer.run(x0, sign, arclen, true, |_, _| false))
}
