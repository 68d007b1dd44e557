use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{TaylorMode, TaylorSpec, TorusGrid};

/// Which equation a constant forcing term drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForceTarget {
    U,
    B,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomForce {
    pub target: ForceTarget,
    pub mode: TaylorMode,
    pub amplitude: f64,
}

/// Body forces `(f1, f2)` added to the velocity and induction equations.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    None,
    /// `f2 = T_{N2}` on the induction equation and the velocity force that
    /// cancels the cross term of `(b . grad) b`, so that `(0, b)` with
    /// `b = e^{-eta N^2 t} T_nm + ((1 - e^{-eta N2^2 t}) / (eta N2^2)) T_{N2}`
    /// solves the forced system exactly.
    Theorem2 { nm: TaylorSpec, n2: TaylorSpec },
    /// Same construction with `T~1` in place of `T_{N2}`.
    Remark2 { nm: TaylorSpec },
    /// Time-independent Taylor forces.
    CustomTaylorList { terms: Vec<CustomForce> },
}

impl ForcingSpec {
    pub fn validate(&self, grid: TorusGrid) -> Result<()> {
        let check = |mode: TaylorMode| -> Result<()> {
            if let TaylorMode::Nm { n, m } = mode {
                TaylorSpec::new(n, m)?.check_resolvable(grid)?;
            }
            Ok(())
        };
        match self {
            ForcingSpec::None => Ok(()),
            ForcingSpec::Theorem2 { nm, n2 } => {
                check((*nm).into())?;
                check((*n2).into())?;
                if n2.eigenvalue() >= nm.eigenvalue() {
                    return Err(Error::Config(format!(
                        "theorem2 forcing needs N2^2 < N^2, got {} >= {}",
                        n2.eigenvalue(),
                        nm.eigenvalue()
                    )));
                }
                Ok(())
            }
            ForcingSpec::Remark2 { nm } => check((*nm).into()),
            ForcingSpec::CustomTaylorList { terms } => {
                terms.iter().try_for_each(|t| check(t.mode))
            }
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_cadence() -> usize {
    100
}

/// Parameters of one time integration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Viscosity.
    pub nu: f64,
    /// Resistivity.
    pub eta: f64,
    /// Grid points per side.
    pub resolution: usize,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub forcing: ForcingSpec,
    #[serde(default = "default_true")]
    pub dealias: bool,
    /// Steps between diagnostics records.
    #[serde(default = "default_cadence")]
    pub output_cadence: usize,
    /// Steps between snapshots; 0 disables them.
    #[serde(default)]
    pub snapshot_cadence: usize,
}

impl SimConfig {
    pub fn new(nu: f64, eta: f64, resolution: usize, dt: f64, t_end: f64) -> Self {
        Self {
            nu,
            eta,
            resolution,
            dt,
            t_end,
            forcing: ForcingSpec::None,
            dealias: true,
            output_cadence: default_cadence(),
            snapshot_cadence: 0,
        }
    }

    pub fn with_forcing(mut self, forcing: ForcingSpec) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.resolution)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            return bad("nu must be finite and >= 0");
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return bad("eta must be finite and >= 0");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be finite and > 0");
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end must be finite and >= 0");
        }
        if self.output_cadence == 0 {
            return bad("output_cadence must be >= 1");
        }
        if matches!(
            self.forcing,
            ForcingSpec::Theorem2 { .. } | ForcingSpec::Remark2 { .. }
        ) && self.eta <= 0.0
        {
            return bad("theorem2/remark2 forcing needs eta > 0");
        }
        self.forcing.validate(grid)
    }
}
