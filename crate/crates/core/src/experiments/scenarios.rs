use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Scenario, Verdict};
use super::diagnostics::DiagnosticsRecord;
use super::diagnostics::DiagnosticsSink;
use crate::error::{Error, Result};
use crate::fields::{
    c1_norm, make_taylor, make_tilde_t1, sobolev_norm, wrap_point, SpectralField2D, C1_OVERSAMPLE,
};
use crate::oracles::{
    forced_exact_b, remark2_error_bound, remark2_exact_error, stability_envelope, ForcedOracle,
    StabilityBound,
};
use crate::solver::{simulate, MHDState, SimConfig, StateSink, TrajectoryRecorder};
use crate::topology::{
    analyze_topology, flow_map, seed_lattice, trace_integral_line_with, Equivalence, TopologyConfig,
    TopologySignature, VelocityHistory, signatures_equivalent,
};

/// Signature plus the search diagnostics behind it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub signature: TopologySignature,
    pub failed_seeds: usize,
    /// Smallest `|det J| / c1^2` over the critical points.
    pub min_rel_det: f64,
    pub non_connecting: usize,
    pub uncorroborated: usize,
}

pub fn summarize_topology(f: &SpectralField2D, cfg: &TopologyConfig) -> Result<TopologySummary> {
    if f.is_zero() {
        return Ok(TopologySummary::default());
    }
    let a = analyze_topology(f, cfg)?;
    let c1sq = a.critical.c1_norm.powi(2);
    Ok(TopologySummary {
        signature: a.signature,
        failed_seeds: a.critical.failures.len(),
        min_rel_det: a
            .critical
            .points
            .iter()
            .map(|p| p.det.abs() / c1sq)
            .fold(f64::INFINITY, f64::min),
        non_connecting: a.connections.non_connecting,
        uncorroborated: a.connections.uncorroborated,
    })
}

/// Verdict of a reconnection chain: the endpoint signatures differ and the
/// final field is structurally stable with the target's invariants.
fn reconnection(initial: &TopologySignature, last: &TopologySignature, target: &TopologySignature) -> Verdict {
    let changed = signatures_equivalent(initial, last) == Equivalence::Distinct;
    let on_target = last.structurally_stable && signatures_equivalent(last, target) == Equivalence::Indistinguishable;
    if changed && on_target {
        Verdict::Reconnection
    } else {
        Verdict::NoReconnection
    }
}

fn run_recorded(
    sim: &SimConfig,
    s0: MHDState,
    diag: &mut DiagnosticsSink<'_>,
    extra: &mut [&mut dyn StateSink],
) -> Result<MHDState> {
    let mut sinks: Vec<&mut dyn StateSink> = Vec::with_capacity(1 + extra.len());
    sinks.push(diag);
    for s in extra.iter_mut() {
        sinks.push(&mut **s);
    }
    simulate(sim, s0, &mut sinks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub expected_verdict: Verdict,
    pub initial: TopologySummary,
    /// Topology of the rescaled field at the horizon.
    pub last: TopologySummary,
    pub rescale_factor: f64,
    pub c1_distance_to_tilde1: f64,
    pub tilde1_signature: TopologySignature,
    #[serde(skip)]
    pub diagnostics: Vec<DiagnosticsRecord>,
}

/// Unforced run from `(0, N^{-1} T_nm + delta T~1)`; the field at the
/// horizon is rescaled by `e^{eta T} / delta` and compared with `T~1`.
pub fn run_theorem1(cfg: &ExperimentConfig) -> Result<Theorem1Report> {
    cfg.validate()?;
    let grid = cfg.sim.grid()?;
    let n = cfg.nm.norm();
    let tilde = make_tilde_t1(grid)?;
    let b0 = make_taylor(cfg.nm, 1.0 / n, grid)?.combine(1.0, &tilde, cfg.delta);
    let initial = summarize_topology(&b0, &cfg.topology)?;
    let mut diag = DiagnosticsSink::new(cfg.r).with_topology(cfg.topology.clone(), cfg.topology_cadence);
    let last = run_recorded(&cfg.sim, MHDState::magnetic(b0), &mut diag, &mut [])?;
    let t = last.t;
    let rescale_factor = if cfg.delta > 0.0 {
        (cfg.sim.eta * t).exp() / cfg.delta
    } else {
        n * (cfg.sim.eta * cfg.nm.eigenvalue() * t).exp()
    };
    let bt = last.b.scaled(rescale_factor);
    let last_summary = summarize_topology(&bt, &cfg.topology)?;
    let tilde_sig = summarize_topology(&tilde, &cfg.topology)?.signature;
    Ok(Theorem1Report {
        scenario: Scenario::Theorem1,
        config: cfg.clone(),
        verdict: reconnection(&initial.signature, &last_summary.signature, &tilde_sig),
        expected_verdict: cfg.expected(),
        initial,
        last: last_summary,
        rescale_factor,
        c1_distance_to_tilde1: c1_norm(&bt.sub(&tilde), C1_OVERSAMPLE),
        tilde1_signature: tilde_sig,
        diagnostics: diag.records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub expected_verdict: Verdict,
    pub initial: TopologySummary,
    /// Topology of `eta N2^2 b(T)`.
    pub last: TopologySummary,
    pub max_u_l2: f64,
    /// Largest `|b - b_exact|_{L^2} / |b_exact|_{L^2}` over the records.
    pub max_oracle_rel_error: f64,
    /// `|eta N2^2 b(T) - T_{N2}|_{H^r}`.
    pub rescaled_error: f64,
    /// `(t, |eta N2^2 b(t) - T_{N2}|_{H^r})` per record.
    pub rescaled_error_series: Vec<(f64, f64)>,
    #[serde(skip)]
    pub diagnostics: Vec<DiagnosticsRecord>,
}

pub fn run_theorem2(cfg: &ExperimentConfig) -> Result<Theorem2Report> {
    cfg.validate()?;
    let grid = cfg.sim.grid()?;
    let oracle = ForcedOracle::theorem2(cfg.nm, cfg.n2, cfg.sim.eta, grid)?;
    let scale = cfg.sim.eta * cfg.n2.eigenvalue();
    let target = oracle.target_field();
    let b0 = oracle.base_field();
    let initial = summarize_topology(&b0, &cfg.topology)?;
    let mut diag = DiagnosticsSink::new(cfg.r)
        .with_extra(|s| {
            vec![
                ("b_minus_exact".into(), s.b.sub(&forced_exact_b(&oracle, s.t))),
                ("exact".into(), forced_exact_b(&oracle, s.t)),
                ("rescaled_minus_target".into(), s.b.scaled(scale).sub(&target)),
            ]
        })
        .with_topology(cfg.topology.clone(), cfg.topology_cadence);
    let last = run_recorded(&cfg.sim, MHDState::magnetic(b0), &mut diag, &mut [])?;
    let records = diag.records;
    let r = cfg.r as usize;
    let max_u_l2 = records.iter().map(|d| d.u_l2_sq.sqrt()).fold(0.0, f64::max);
    let max_oracle_rel_error = records
        .iter()
        .map(|d| d.sobolev["b_minus_exact"][0] / d.sobolev["exact"][0])
        .fold(0.0, f64::max);
    let rescaled_error_series: Vec<(f64, f64)> = records
        .iter()
        .map(|d| (d.t, d.sobolev["rescaled_minus_target"][r]))
        .collect();
    let bt = last.b.scaled(scale);
    let last_summary = summarize_topology(&bt, &cfg.topology)?;
    let verdict = if signatures_equivalent(&initial.signature, &last_summary.signature) == Equivalence::Distinct {
        Verdict::Reconnection
    } else {
        Verdict::NoReconnection
    };
    Ok(Theorem2Report {
        scenario: Scenario::Theorem2,
        config: cfg.clone(),
        verdict,
        expected_verdict: cfg.expected(),
        initial,
        last: last_summary,
        max_u_l2,
        max_oracle_rel_error,
        rescaled_error: sobolev_norm(&bt.sub(&target), cfg.r),
        rescaled_error_series,
        diagnostics: records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Remark2Report {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub expected_verdict: Verdict,
    pub initial: TopologySummary,
    /// Topology of `eta b(T)`.
    pub last: TopologySummary,
    /// `|eta b(T) - T~1|_{H^r}` from the closed form.
    pub exact_error: f64,
    /// The same quantity from the simulated `b(T)`.
    pub simulated_error: f64,
    /// `eta (N^r e^{-eta N^2 T} + e^{-eta T})`.
    pub printed_bound: f64,
    pub printed_bound_holds: bool,
    /// `eta e^{-eta N^2 T} |T_nm|_{H^r} + e^{-eta T} |T~1|_{H^r}`, the
    /// triangle-inequality bound of the closed form.
    pub triangle_bound: f64,
    pub c1_distance_to_tilde1: f64,
    #[serde(skip)]
    pub diagnostics: Vec<DiagnosticsRecord>,
}

pub fn run_remark2(cfg: &ExperimentConfig) -> Result<Remark2Report> {
    cfg.validate()?;
    let grid = cfg.sim.grid()?;
    let eta = cfg.sim.eta;
    let oracle = ForcedOracle::remark2(cfg.nm, eta, grid)?;
    let tilde = oracle.target_field();
    let b0 = oracle.base_field();
    let initial = summarize_topology(&b0, &cfg.topology)?;
    let mut diag = DiagnosticsSink::new(cfg.r)
        .with_extra(|s| vec![("b_minus_exact".into(), s.b.sub(&forced_exact_b(&oracle, s.t)))])
        .with_topology(cfg.topology.clone(), cfg.topology_cadence);
    let last = run_recorded(&cfg.sim, MHDState::magnetic(b0.clone()), &mut diag, &mut [])?;
    let t = last.t;
    let bt = last.b.scaled(eta);
    let last_summary = summarize_topology(&bt, &cfg.topology)?;
    let tilde_sig = summarize_topology(&tilde, &cfg.topology)?.signature;
    let n = cfg.nm.norm();
    let exact_error = remark2_exact_error(cfg.nm, cfg.r, eta, t, grid)?;
    let printed_bound = remark2_error_bound(n, cfg.r, eta, t);
    let triangle_bound = eta * (-eta * n * n * t).exp() * sobolev_norm(&b0, cfg.r)
        + (-eta * t).exp() * sobolev_norm(&tilde, cfg.r);
    Ok(Remark2Report {
        scenario: Scenario::Remark2,
        config: cfg.clone(),
        verdict: reconnection(&initial.signature, &last_summary.signature, &tilde_sig),
        expected_verdict: cfg.expected(),
        initial,
        last: last_summary,
        exact_error,
        simulated_error: sobolev_norm(&bt.sub(&tilde), cfg.r),
        printed_bound,
        printed_bound_holds: exact_error <= printed_bound,
        triangle_bound,
        c1_distance_to_tilde1: c1_norm(&bt.sub(&tilde), C1_OVERSAMPLE),
        diagnostics: diag.records,
    })
}

/// Records `u` every `cadence` steps for the flow map, plus the first and
/// last magnetic fields.
struct FlowRecorder {
    cadence: usize,
    t0: f64,
    interval: f64,
    u: Vec<SpectralField2D>,
    b_first: Option<SpectralField2D>,
    b_last: Option<(f64, SpectralField2D)>,
}

impl StateSink for FlowRecorder {
    fn cadence(&self) -> Option<usize> {
        Some(self.cadence)
    }

    fn observe(&mut self, _step: usize, state: &MHDState) -> Result<()> {
        if self.b_first.is_none() {
            self.t0 = state.t;
            self.b_first = Some(state.b.clone());
        }
        let expected = self.t0 + self.u.len() as f64 * self.interval;
        if (state.t - expected).abs() <= 1e-9 * self.interval {
            self.u.push(state.u.clone());
        }
        self.b_last = Some((state.t, state.b.clone()));
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenInReport {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub expected_verdict: Verdict,
    /// `max |b(t, Phi_t x) - grad Phi_t(x) b0(x)| / |b0|_{C^1}` over the
    /// seed lattice.
    pub frozen_in_error: f64,
    /// Hausdorff distance between a pushed-forward field line of `b0` and
    /// the field line of `b(t)` through the pushed seed.
    pub line_hausdorff: f64,
    pub max_det_defect: f64,
    pub seeds: usize,
    #[serde(skip)]
    pub diagnostics: Vec<DiagnosticsRecord>,
}

fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let one = |p: &[[f64; 2]], q: &[[f64; 2]]| {
        p.iter()
            .map(|x| {
                q.iter()
                    .map(|y| (x[0] - y[0]).hypot(x[1] - y[1]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

/// Ideal-induction run checking that magnetic lines are carried by the
/// flow.
pub fn run_frozen_in(cfg: &ExperimentConfig) -> Result<FrozenInReport> {
    cfg.validate()?;
    let grid = cfg.sim.grid()?;
    let u0 = cfg.initial_u.build(grid)?;
    let b0 = cfg.initial_b.build(grid)?;
    let s0 = MHDState::new(u0, b0.clone(), 0.0)?;
    let mut rec = FlowRecorder {
        cadence: cfg.flow_cadence,
        t0: 0.0,
        interval: cfg.flow_cadence as f64 * cfg.sim.dt,
        u: Vec::new(),
        b_first: None,
        b_last: None,
    };
    let mut diag = DiagnosticsSink::new(cfg.r);
    let last = run_recorded(&cfg.sim, s0, &mut diag, &mut [&mut rec])?;
    let t = last.t;
    let seeds = seed_lattice(cfg.seed_lattice);
    let (frozen_in_error, line_hausdorff, max_det_defect) = if t == 0.0 {
        (0.0, 0.0, 0.0)
    } else {
        if t > rec.t0 + (rec.u.len() - 1) as f64 * rec.interval + 1e-9 * rec.interval {
            // the horizon is not on the flow cadence; use the final state
            // as the last snapshot only if it extends the uniform grid
            return Err(Error::Config(format!(
                "t_end = {t} must be a multiple of flow_cadence * dt = {}",
                rec.interval
            )));
        }
        let history = VelocityHistory::new(rec.t0, rec.interval, &rec.u)?;
        let flow = flow_map(&history, &seeds, t)?;
        let scale = c1_norm(&b0, C1_OVERSAMPLE);
        let e0 = crate::fields::FieldEvaluator::new(&b0);
        let et = crate::fields::FieldEvaluator::new(&last.b);
        let mut worst: f64 = 0.0;
        for ((x, y), j) in seeds.iter().zip(&flow.images).zip(&flow.jacobians) {
            let v = e0.value(*x);
            let pushed = [j[0][0] * v[0] + j[0][1] * v[1], j[1][0] * v[0] + j[1][1] * v[1]];
            let w = et.value(wrap_point(*y));
            worst = worst.max((w[0] - pushed[0]).hypot(w[1] - pushed[1]));
        }
        let frozen = if scale > 0.0 { worst / scale } else { 0.0 };

        let seed = [1.0, 2.0];
        let line0 = trace_integral_line_with(&b0, seed, cfg.line_arclength, cfg.topology.trace_step, false, &cfg.topology)?;
        let pushed = flow_map(&history, &line0.points, t)?.images;
        let len: f64 = pushed.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum();
        // overshoot, then cut the traced line where it passes the pushed end
        let h = cfg.topology.trace_step;
        let line_t = trace_integral_line_with(&last.b, pushed[0], 1.1 * len + 10.0 * h, h, false, &cfg.topology)?;
        let end = pushed[pushed.len() - 1];
        let cut = line_t
            .points
            .iter()
            .map(|p| (p[0] - end[0]).hypot(p[1] - end[1]))
            .enumerate()
            .fold((0, f64::INFINITY), |a, (i, d)| if d < a.1 { (i, d) } else { a })
            .0;
        (frozen, hausdorff(&pushed, &line_t.points[..=cut]), flow.max_det_defect())
    };
    let pass = frozen_in_error < cfg.frozen_tol && line_hausdorff < cfg.hausdorff_tol;
    Ok(FrozenInReport {
        scenario: Scenario::FrozenIn,
        config: cfg.clone(),
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        expected_verdict: cfg.expected(),
        frozen_in_error,
        line_hausdorff,
        max_det_defect,
        seeds: seeds.len(),
        diagnostics: diag.records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub expected_verdict: Verdict,
    pub sigma: f64,
    /// `(t, Q(t))` with `Q = |v|^2_{H^r} + |h|^2_{H^r}`.
    pub q_series: Vec<(f64, f64)>,
    /// `delta^2 |T~1|^2_{H^r}`.
    pub q0_expected: f64,
    /// Least-squares slope of `ln Q` over the second half of the run.
    pub late_log_slope: f64,
    pub slope_threshold: f64,
    /// `(t, delta^2 N^{2r} e^{-2 sigma t})`.
    pub envelope: Vec<(f64, f64)>,
    /// Earliest record time after which `Q` never increases.
    pub monotone_from: Option<f64>,
    /// `(t, Q_{delta/2}(t) / Q_delta(t))`, expected near 1/4.
    pub half_delta_ratio: Vec<(f64, f64)>,
    /// `max |4 Q_{delta/2} / Q_delta - 1|`.
    pub half_delta_deviation: Option<f64>,
}

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), p| {
        (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx) * (p.0 - mx))
    });
    num / den
}

/// Stability functional of the perturbation, from two (three with the
/// scaling check) simulations sharing one cadence.
pub fn run_stability_decay(cfg: &ExperimentConfig) -> Result<StabilityReport> {
    cfg.validate()?;
    let grid = cfg.sim.grid()?;
    let n = cfg.nm.norm();
    let reference = make_taylor(cfg.nm, 1.0 / n, grid)?;
    let tilde = make_tilde_t1(grid)?;
    let run = |delta: f64| -> Result<Vec<MHDState>> {
        let mut rec = TrajectoryRecorder::new();
        simulate(&cfg.sim, MHDState::magnetic(reference.combine(1.0, &tilde, delta)), &mut [&mut rec])?;
        Ok(rec.into_states())
    };
    let base = run(0.0)?;
    let q_of = |states: &[MHDState]| -> Vec<(f64, f64)> {
        states
            .iter()
            .zip(&base)
            .map(|(p, w)| {
                let v = sobolev_norm(&p.u.sub(&w.u), cfg.r);
                let h = sobolev_norm(&p.b.sub(&w.b), cfg.r);
                (p.t, v * v + h * h)
            })
            .collect()
    };
    let q_series = q_of(&run(cfg.delta)?);
    let sigma = cfg.sigma();
    let t_end = cfg.sim.t_end;
    let late: Vec<(f64, f64)> = q_series
        .iter()
        .filter(|p| p.0 >= 0.5 * t_end && p.1 > 0.0)
        .map(|p| (p.0, p.1.ln()))
        .collect();
    let late_log_slope = if late.len() >= 2 { fit_slope(&late) } else { f64::NAN };
    let slope_threshold = -2.0 * sigma * (1.0 - cfg.tol_rate);
    let bound = StabilityBound::new(sigma, cfg.r, cfg.delta, n, 1.0, cfg.sim.nu, cfg.sim.eta)?;
    let envelope = q_series.iter().map(|p| (p.0, stability_envelope(&bound, p.0))).collect();
    let mut monotone_from = q_series.last().map(|p| p.0);
    for i in (1..q_series.len()).rev() {
        if q_series[i].1 <= q_series[i - 1].1 {
            monotone_from = Some(q_series[i - 1].0);
        } else {
            break;
        }
    }
    let (half_delta_ratio, half_delta_deviation) = if cfg.check_delta_scaling && cfg.delta > 0.0 {
        let half = q_of(&run(0.5 * cfg.delta)?);
        let ratio: Vec<(f64, f64)> = half
            .iter()
            .zip(&q_series)
            .map(|(a, b)| (a.0, a.1 / b.1))
            .collect();
        let dev = ratio.iter().map(|p| (4.0 * p.1 - 1.0).abs()).fold(0.0, f64::max);
        (ratio, Some(dev))
    } else {
        (Vec::new(), None)
    };
    let slope_ok = late_log_slope <= slope_threshold;
    let scaling_ok = half_delta_deviation.map_or(true, |d| d <= 0.05);
    Ok(StabilityReport {
        scenario: Scenario::StabilityDecay,
        config: cfg.clone(),
        verdict: if slope_ok && scaling_ok { Verdict::Pass } else { Verdict::Fail },
        expected_verdict: cfg.expected(),
        sigma,
        q0_expected: cfg.delta * cfg.delta * sobolev_norm(&tilde, cfg.r).powi(2),
        q_series,
        late_log_slope,
        slope_threshold,
        envelope,
        monotone_from,
        half_delta_ratio,
        half_delta_deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomReport {
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub verdict: Verdict,
    pub expected_verdict: Verdict,
    pub final_time: f64,
    pub final_energy: f64,
    pub initial: TopologySummary,
    pub last: TopologySummary,
    #[serde(skip)]
    pub diagnostics: Vec<DiagnosticsRecord>,
    #[serde(skip)]
    pub final_state: Option<MHDState>,
}

/// Plain simulation from `initial`, or from the configured initial fields;
/// extra sinks (e.g. snapshot writers) observe the run too.
pub fn run_custom(
    cfg: &ExperimentConfig,
    initial: Option<MHDState>,
    extra: &mut [&mut dyn StateSink],
) -> Result<CustomReport> {
    cfg.validate()?;
    let grid = cfg.sim.grid()?;
    let s0 = match initial {
        Some(s) if s.grid() != grid => {
            return Err(Error::Config(format!(
                "initial state has resolution {}, config asks for {}",
                s.grid().resolution(),
                grid.resolution()
            )))
        }
        Some(s) => s,
        None => MHDState::new(cfg.initial_u.build(grid)?, cfg.initial_b.build(grid)?, 0.0)?,
    };
    let initial = summarize_topology(&s0.b, &cfg.topology)?;
    let mut diag = DiagnosticsSink::new(cfg.r).with_topology(cfg.topology.clone(), cfg.topology_cadence);
    let last = run_recorded(&cfg.sim, s0, &mut diag, extra)?;
    Ok(CustomReport {
        scenario: Scenario::Custom,
        config: cfg.clone(),
        verdict: Verdict::Pass,
        expected_verdict: cfg.expected(),
        final_time: last.t,
        final_energy: last.energy(),
        initial,
        last: summarize_topology(&last.b, &cfg.topology)?,
        diagnostics: diag.records,
        final_state: Some(last),
    })
}

/// Report of any scenario.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScenarioReport {
    Theorem1(Theorem1Report),
    Theorem2(Theorem2Report),
    Remark2(Remark2Report),
    FrozenIn(FrozenInReport),
    StabilityDecay(StabilityReport),
    Custom(CustomReport),
}

/// Named columns of plot-ready data.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub log_y: bool,
}

impl ScenarioReport {
    pub fn verdict(&self) -> Verdict {
        match self {
            ScenarioReport::Theorem1(r) => r.verdict,
            ScenarioReport::Theorem2(r) => r.verdict,
            ScenarioReport::Remark2(r) => r.verdict,
            ScenarioReport::FrozenIn(r) => r.verdict,
            ScenarioReport::StabilityDecay(r) => r.verdict,
            ScenarioReport::Custom(r) => r.verdict,
        }
    }

    pub fn expected_verdict(&self) -> Verdict {
        match self {
            ScenarioReport::Theorem1(r) => r.expected_verdict,
            ScenarioReport::Theorem2(r) => r.expected_verdict,
            ScenarioReport::Remark2(r) => r.expected_verdict,
            ScenarioReport::FrozenIn(r) => r.expected_verdict,
            ScenarioReport::StabilityDecay(r) => r.expected_verdict,
            ScenarioReport::Custom(r) => r.expected_verdict,
        }
    }

    pub fn diagnostics(&self) -> &[DiagnosticsRecord] {
        match self {
            ScenarioReport::Theorem1(r) => &r.diagnostics,
            ScenarioReport::Theorem2(r) => &r.diagnostics,
            ScenarioReport::Remark2(r) => &r.diagnostics,
            ScenarioReport::FrozenIn(r) => &r.diagnostics,
            ScenarioReport::StabilityDecay(_) => &[],
            ScenarioReport::Custom(r) => &r.diagnostics,
        }
    }

    pub fn plot_series(&self) -> Vec<PlotSeries> {
        let mut out = Vec::new();
        let d = self.diagnostics();
        if !d.is_empty() {
            out.push(PlotSeries {
                name: "energy".into(),
                columns: vec!["t".into(), "u_l2_sq".into(), "b_l2_sq".into()],
                rows: d.iter().map(|r| vec![r.t, r.u_l2_sq, r.b_l2_sq]).collect(),
                log_y: true,
            });
        }
        let pairs = |name: &str, col: &str, v: &[(f64, f64)], log_y: bool| PlotSeries {
            name: name.into(),
            columns: vec!["t".into(), col.into()],
            rows: v.iter().map(|p| vec![p.0, p.1]).collect(),
            log_y,
        };
        match self {
            ScenarioReport::Theorem2(r) => {
                out.push(pairs("rescaled_error", "hr_error", &r.rescaled_error_series, true));
            }
            ScenarioReport::StabilityDecay(r) => {
                out.push(PlotSeries {
                    name: "stability".into(),
                    columns: vec!["t".into(), "q".into(), "envelope".into()],
                    rows: r.q_series.iter().zip(&r.envelope).map(|(q, e)| vec![q.0, q.1, e.1]).collect(),
                    log_y: true,
                });
                if !r.half_delta_ratio.is_empty() {
                    out.push(pairs("half_delta_ratio", "ratio", &r.half_delta_ratio, false));
                }
            }
            _ => {}
        }
        out
    }
}

pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ScenarioReport> {
    Ok(match cfg.scenario {
        Scenario::Theorem1 => ScenarioReport::Theorem1(run_theorem1(cfg)?),
        Scenario::Theorem2 => ScenarioReport::Theorem2(run_theorem2(cfg)?),
        Scenario::Remark2 => ScenarioReport::Remark2(run_remark2(cfg)?),
        Scenario::FrozenIn => ScenarioReport::FrozenIn(run_frozen_in(cfg)?),
        Scenario::StabilityDecay => ScenarioReport::StabilityDecay(run_stability_decay(cfg)?),
        Scenario::Custom => ScenarioReport::Custom(run_custom(cfg, None, &mut [])?),
    })
}
