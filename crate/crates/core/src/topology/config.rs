use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances of the critical-point search and separatrix tracing.
///
/// Relative tolerances are scaled by the C^1 norm of the analysed field
/// (squared for the determinant band) or by the oscillation of its stream
/// function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    /// Newton stops once `|f| <= newton_tol * c1`.
    pub newton_tol: f64,
    pub max_iter: usize,
    /// Degenerate band `|det J| <= deg_tol_rel * c1^2`.
    pub deg_tol_rel: f64,
    /// Refined zeros closer than this are merged.
    pub dedup_radius: f64,
    pub eps_launch: f64,
    pub arrival_radius: f64,
    /// Claimed connections need `|psi(a) - psi(b)| < psi_tol_rel * osc(psi)`.
    pub psi_tol_rel: f64,
    pub max_arclength: f64,
    pub trace_step: f64,
    /// Traces stop when `|f| < stop_tol_rel * sup|f|`.
    pub stop_tol_rel: f64,
    /// Sign-change search grid; `None` uses twice the field resolution.
    pub seed_grid: Option<usize>,
    pub c1_oversample: usize,
    /// Modes below this fraction of the largest coefficient are ignored by
    /// Newton.
    pub prune_rel: f64,
    /// Coarser pruning used while tracing integral lines.
    pub trace_prune_rel: f64,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-12,
            max_iter: 50,
            deg_tol_rel: 1e-8,
            dedup_radius: 1e-7,
            eps_launch: 1e-4,
            arrival_radius: 1e-2,
            psi_tol_rel: 1e-6,
            max_arclength: 50.0 * 2.0 * PI,
            trace_step: 5e-3,
            stop_tol_rel: 1e-9,
            seed_grid: None,
            c1_oversample: crate::fields::C1_OVERSAMPLE,
            prune_rel: 1e-14,
            trace_prune_rel: 1e-10,
        }
    }
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("newton_tol", self.newton_tol),
            ("deg_tol_rel", self.deg_tol_rel),
            ("dedup_radius", self.dedup_radius),
            ("eps_launch", self.eps_launch),
            ("arrival_radius", self.arrival_radius),
            ("psi_tol_rel", self.psi_tol_rel),
            ("max_arclength", self.max_arclength),
            ("trace_step", self.trace_step),
            ("stop_tol_rel", self.stop_tol_rel),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.eps_launch >= self.arrival_radius {
            return Err(Error::Config("eps_launch must be below arrival_radius".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be >= 1".into()));
        }
        if let Some(s) = self.seed_grid {
            if s < 8 || s % 2 != 0 {
                return Err(Error::Config(format!("seed_grid must be even and >= 8, got {s}")));
            }
        }
        if self.c1_oversample < 2 {
            return Err(Error::Config("c1_oversample must be >= 2".into()));
        }
        Ok(())
    }
}
