use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::fieldspec::FieldExpr;
use crate::error::{Error, Result};
use crate::fields::TaylorSpec;
use crate::solver::{ForcingSpec, SimConfig};
use crate::topology::TopologyConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Theorem1,
    Theorem2,
    Remark2,
    FrozenIn,
    StabilityDecay,
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Theorem1 => "theorem1",
            Scenario::Theorem2 => "theorem2",
            Scenario::Remark2 => "remark2",
            Scenario::FrozenIn => "frozen-in",
            Scenario::StabilityDecay => "stability-decay",
            Scenario::Custom => "custom",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Reconnection,
    NoReconnection,
    Pass,
    Fail,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Reconnection => "reconnection",
            Verdict::NoReconnection => "no-reconnection",
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Everything a scenario run needs. Files are merged onto
/// [`ExperimentConfig::defaults`] of their scenario, so they only name what
/// they change.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub sim: SimConfig,
    /// Large-eigenvalue mode `T_nm`.
    pub nm: TaylorSpec,
    /// Small-eigenvalue mode `T_{N2}` of the forced construction.
    pub n2: TaylorSpec,
    /// Perturbation size of `T~1`.
    pub delta: f64,
    /// Sobolev index of the reported norms.
    pub r: u32,
    /// Decay rate of the stability envelope; `None` picks `0.9 min(nu, eta)`.
    pub sigma: Option<f64>,
    /// Relative slack of the fitted decay rate.
    pub tol_rate: f64,
    pub topology: TopologyConfig,
    /// Diagnostics records between magnetic signatures; 0 means endpoints
    /// only.
    pub topology_cadence: usize,
    /// Frozen-in seeds per side of the seed lattice.
    pub seed_lattice: usize,
    /// Steps between velocity snapshots used by the flow map.
    pub flow_cadence: usize,
    /// Arclength of the pushed-forward field line.
    pub line_arclength: f64,
    pub frozen_tol: f64,
    pub hausdorff_tol: f64,
    /// Also run the perturbation with `delta / 2` to check the quadratic
    /// scaling of the stability functional.
    pub check_delta_scaling: bool,
    /// Initial fields of a custom run.
    pub initial_u: FieldExpr,
    pub initial_b: FieldExpr,
    /// Verdict that maps to exit status 0; `None` uses the scenario default.
    pub expected_verdict: Option<Verdict>,
}

impl ExperimentConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let nm = TaylorSpec { n: 4, m: 4 };
        let n2 = TaylorSpec { n: 1, m: 1 };
        let mut sim = SimConfig::new(0.5, 0.5, 128, 1e-3, 2.0);
        let mut initial_b = FieldExpr::zero();
        match scenario {
            Scenario::Theorem2 => sim.forcing = ForcingSpec::Theorem2 { nm, n2 },
            Scenario::Remark2 => sim.forcing = ForcingSpec::Remark2 { nm },
            Scenario::FrozenIn => {
                sim = SimConfig::new(0.1, 0.0, 128, 1e-3, 0.25);
                sim.output_cadence = 25;
                initial_b = "tilde1".parse().expect("literal");
            }
            Scenario::Custom => {
                sim = SimConfig::new(0.1, 0.1, 64, 1e-3, 1.0);
                initial_b = "taylor:1,1".parse().expect("literal");
            }
            Scenario::Theorem1 | Scenario::StabilityDecay => {}
        }
        if scenario == Scenario::StabilityDecay {
            sim.output_cadence = 50;
        }
        Self {
            scenario,
            sim,
            nm,
            n2,
            delta: 1e-3,
            r: 3,
            sigma: None,
            tol_rate: 0.1,
            topology: TopologyConfig::default(),
            topology_cadence: 0,
            seed_lattice: 8,
            flow_cadence: 5,
            line_arclength: 2.0,
            frozen_tol: 1e-3,
            hausdorff_tol: 5e-3,
            check_delta_scaling: true,
            initial_u: FieldExpr::zero(),
            initial_b,
            expected_verdict: None,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
            .unwrap_or_else(|| crate::oracles::StabilityBound::default_sigma(self.sim.nu, self.sim.eta))
    }

    pub fn expected(&self) -> Verdict {
        if let Some(v) = self.expected_verdict {
            return v;
        }
        match self.scenario {
            Scenario::Theorem1 if self.delta > 0.0 && self.sim.t_end > 0.0 => Verdict::Reconnection,
            Scenario::Theorem1 => Verdict::NoReconnection,
            Scenario::Theorem2 | Scenario::Remark2 if self.sim.t_end > 0.0 => Verdict::Reconnection,
            Scenario::Theorem2 | Scenario::Remark2 => Verdict::NoReconnection,
            Scenario::FrozenIn | Scenario::StabilityDecay | Scenario::Custom => Verdict::Pass,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        self.topology.validate()?;
        TaylorSpec::new(self.nm.n, self.nm.m)?;
        TaylorSpec::new(self.n2.n, self.n2.m)?;
        let bad = |m: String| Err(Error::Config(m));
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return bad(format!("delta must be finite and >= 0, got {}", self.delta));
        }
        if self.r > 8 {
            return bad(format!("r must be <= 8, got {}", self.r));
        }
        if self.seed_lattice == 0 || self.flow_cadence == 0 {
            return bad("seed_lattice and flow_cadence must be >= 1".into());
        }
        let want_forcing = match self.scenario {
            Scenario::Theorem2 => Some(ForcingSpec::Theorem2 { nm: self.nm, n2: self.n2 }),
            Scenario::Remark2 => Some(ForcingSpec::Remark2 { nm: self.nm }),
            Scenario::Theorem1 | Scenario::StabilityDecay | Scenario::FrozenIn => Some(ForcingSpec::None),
            Scenario::Custom => None,
        };
        if let Some(f) = want_forcing {
            if self.sim.forcing != f {
                return bad(format!(
                    "scenario {} fixes the forcing to {:?}, config has {:?}",
                    self.scenario.name(),
                    f,
                    self.sim.forcing
                ));
            }
        }
        match self.scenario {
            Scenario::Theorem2 if self.n2.eigenvalue() >= self.nm.eigenvalue() => {
                bad("theorem2 needs N2^2 < N^2".into())
            }
            Scenario::FrozenIn if self.sim.eta != 0.0 => bad(format!(
                "frozen-in needs eta = 0, got {}",
                self.sim.eta
            )),
            Scenario::StabilityDecay if !(self.sim.nu > 0.0 && self.sim.eta > 0.0) => {
                bad("stability-decay needs nu, eta > 0".into())
            }
            _ => Ok(()),
        }
    }

    /// Merge `overrides` onto the defaults of `scenario` (or of the
    /// scenario named in `overrides`), then validate.
    pub fn resolve(scenario: Option<Scenario>, overrides: Value) -> Result<Self> {
        let named = match overrides.get("scenario") {
            Some(v) => Some(
                serde_json::from_value::<Scenario>(v.clone())
                    .map_err(|e| Error::Config(format!("scenario: {e}")))?,
            ),
            None => None,
        };
        let scenario = match (scenario, named) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!(
                    "config names scenario {} but {} was requested",
                    b.name(),
                    a.name()
                )))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::Config("config does not name a scenario".into())),
        };
        let mut base = serde_json::to_value(Self::defaults(scenario))?;
        if !overrides.is_object() && !overrides.is_null() {
            return Err(Error::Config("config must be a JSON object".into()));
        }
        // a forcing given by the file replaces the default one wholesale
        let forcing_given = overrides.pointer("/sim/forcing").is_some();
        if forcing_given {
            base["sim"]["forcing"] = Value::Null;
        }
        merge(&mut base, overrides);
        if !forcing_given {
            let cfg: Self = parse_value(base.clone())?;
            let derived = match scenario {
                Scenario::Theorem2 => Some(ForcingSpec::Theorem2 { nm: cfg.nm, n2: cfg.n2 }),
                Scenario::Remark2 => Some(ForcingSpec::Remark2 { nm: cfg.nm }),
                _ => None,
            };
            if let Some(f) = derived {
                base["sim"]["forcing"] = serde_json::to_value(f)?;
            }
        }
        let cfg: Self = parse_value(base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(scenario: Option<Scenario>, text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        Self::resolve(scenario, v)
    }

    pub fn load(scenario: Option<Scenario>, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(scenario, &text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }
}

fn parse_value<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        Error::Config(format!("field '{path}': {}", e.into_inner()))
    })
}

/// Recursive object merge; non-object values replace.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) if !v.is_null() => *slot = v,
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn defaults_validate() {
        for s in [
            Scenario::Theorem1,
            Scenario::Theorem2,
            Scenario::Remark2,
            Scenario::FrozenIn,
            Scenario::StabilityDecay,
            Scenario::Custom,
        ] {
            ExperimentConfig::defaults(s).validate().unwrap();
            let r = ExperimentConfig::resolve(Some(s), json!({})).unwrap();
            assert_eq!(r, ExperimentConfig::defaults(s));
        }
    }

    #[test]
    fn overrides_merge_and_rederive_forcing() {
        let c = ExperimentConfig::resolve(
            Some(Scenario::Theorem2),
            json!({"n2": {"n": 2, "m": 1}, "sim": {"resolution": 64}}),
        )
        .unwrap();
        assert_eq!(c.sim.resolution, 64);
        assert_eq!(c.sim.dt, 1e-3);
        assert_eq!(
            c.sim.forcing,
            ForcingSpec::Theorem2 {
                nm: TaylorSpec { n: 4, m: 4 },
                n2: TaylorSpec { n: 2, m: 1 }
            }
        );
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = ExperimentConfig::resolve(Some(Scenario::Theorem1), json!({"sim": {"dt": "big"}})).unwrap_err();
        assert!(e.to_string().contains("sim.dt"), "{e}");
        let e = ExperimentConfig::resolve(Some(Scenario::Theorem1), json!({"bogus": 1})).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = ExperimentConfig::from_json_str(None, "{\n  \"scenario\": \"theorem1\",\n  oops\n}").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = ExperimentConfig::resolve(Some(Scenario::Theorem1), json!({"scenario": "remark2"})).unwrap_err();
        assert!(matches!(e, Error::Config(_)));
        let e = ExperimentConfig::resolve(Some(Scenario::FrozenIn), json!({"sim": {"eta": 0.1}})).unwrap_err();
        assert!(e.to_string().contains("eta"));
    }

    #[test]
    fn expected_verdicts() {
        let mut c = ExperimentConfig::defaults(Scenario::Theorem1);
        assert_eq!(c.expected(), Verdict::Reconnection);
        c.delta = 0.0;
        assert_eq!(c.expected(), Verdict::NoReconnection);
        c.expected_verdict = Some(Verdict::Fail);
        assert_eq!(c.expected(), Verdict::Fail);
    }
}

#[cfg(test)]
pub(crate) fn merge_for_tests(base: &mut Value, over: Value) {
    merge(base, over)
}
