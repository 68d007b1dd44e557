use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use super::config::{ExperimentConfig, Scenario, Verdict};
use super::diagnostics::write_ndjson;
use super::fieldspec::FieldExpr;
use super::plots::write_plots;
use super::scenarios::{run_custom, run_scenario, ScenarioReport};
use super::snapshot::{Snapshot, SnapshotSink};
use crate::error::{Error, Result};
use crate::fields::{SpectralField2D, TorusGrid};
use crate::solver::StateSink;
use crate::topology::{
    analyze_topology, ConnectionReport, CriticalPoint, SeedFailure, TopologyConfig, TopologySignature,
};

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "MHD_OUT_DIR";
const DEFAULT_OUT: &str = "mhd-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "torus-mhd", version, about = "2D MHD on the torus and magnetic line topology")]
struct Cli {
    /// JSON config merged onto the scenario defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: $MHD_OUT_DIR/<command> or ./mhd-out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Critical-point seed grid size per axis.
    #[arg(long, global = true)]
    seed_grid: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write .dat series and a gnuplot script next to the report.
    #[arg(long, global = true)]
    emit_plots: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a snapshot of a field expression such as `taylor:4,4 + 0.001*tilde1`.
    GenField {
        #[arg(long)]
        field: FieldExpr,
        #[arg(long, default_value = "zero")]
        velocity: FieldExpr,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value = "field.mhd")]
        name: String,
    },
    /// Run a custom simulation, writing snapshots at the configured cadence.
    Simulate {
        #[arg(long)]
        from_snapshot: Option<PathBuf>,
    },
    /// Critical points, saddle connections and structural stability of a field.
    Topology {
        #[arg(long, conflicts_with = "snapshot", required_unless_present = "snapshot")]
        field: Option<FieldExpr>,
        #[arg(long)]
        snapshot: Option<PathBuf>,
        /// Field name inside the snapshot.
        #[arg(long, default_value = "b")]
        component: String,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    Theorem1,
    Theorem2,
    Remark2,
    FrozenIn,
    Stability,
    /// Run the configs of a JSON array (or `{"runs": [...]}`) concurrently.
    Sweep,
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::GenField { .. } => "gen-field",
            Command::Simulate { .. } => "simulate",
            Command::Topology { .. } => "topology",
            Command::Theorem1 => "theorem1",
            Command::Theorem2 => "theorem2",
            Command::Remark2 => "remark2",
            Command::FrozenIn => "frozen-in",
            Command::Stability => "stability",
            Command::Sweep => "sweep",
        }
    }

    fn scenario(&self) -> Option<Scenario> {
        match self {
            Command::Theorem1 => Some(Scenario::Theorem1),
            Command::Theorem2 => Some(Scenario::Theorem2),
            Command::Remark2 => Some(Scenario::Remark2),
            Command::FrozenIn => Some(Scenario::FrozenIn),
            Command::Stability => Some(Scenario::StabilityDecay),
            _ => None,
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
        }
    };
    let threads = cli.threads;
    match crate::par::with_threads(threads, || dispatch(&cli)).and_then(|r| r) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn out_dir(cli: &Cli) -> PathBuf {
    if let Some(p) = &cli.out {
        return p.clone();
    }
    let root = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    root.join(cli.command.label())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn load_experiment(cli: &Cli, scenario: Option<Scenario>) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(scenario, p)?,
        None => ExperimentConfig::resolve(scenario, Value::Null)?,
    };
    apply_seed_grid(cli, &mut cfg.topology)?;
    cfg.validate()?;
    Ok(cfg)
}

fn apply_seed_grid(cli: &Cli, topo: &mut TopologyConfig) -> Result<()> {
    if let Some(m) = cli.seed_grid {
        topo.seed_grid = Some(m);
        topo.validate()?;
    }
    Ok(())
}

fn exit_for(verdict: Verdict, expected: Verdict) -> i32 {
    if verdict == expected {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let out = out_dir(cli);
    match &cli.command {
        Command::GenField { field, velocity, resolution, name } => {
            let grid = TorusGrid::new(*resolution)?;
            let state = crate::solver::MHDState::new(velocity.build(grid)?, field.build(grid)?, 0.0)?;
            create_dir(&out)?;
            let path = out.join(name);
            let snap = Snapshot::from_state(&state, 0.0, 0.0);
            snap.save(&path)?;
            log::info!("wrote {}", path.display());
            print_json(&snap.header)?;
            Ok(EXIT_OK)
        }
        Command::Simulate { from_snapshot } => {
            let cfg = load_experiment(cli, Some(Scenario::Custom))?;
            let initial = match from_snapshot {
                Some(p) => Some(Snapshot::load(p)?.to_state()?),
                None => None,
            };
            create_dir(&out)?;
            let mut snaps = SnapshotSink::new(out.join("snapshots"), cfg.sim.snapshot_cadence, cfg.sim.nu, cfg.sim.eta);
            let mut extra: Vec<&mut dyn StateSink> = Vec::new();
            if cfg.sim.snapshot_cadence > 0 {
                create_dir(&out.join("snapshots"))?;
                extra.push(&mut snaps);
            }
            let report = run_custom(&cfg, initial, &mut extra)?;
            finish_scenario(cli, &out, &ScenarioReport::Custom(report))
        }
        Command::Topology { field, snapshot, component, resolution } => {
            let mut topo = match &cli.config {
                Some(p) => load_topology_config(p)?,
                None => TopologyConfig::default(),
            };
            apply_seed_grid(cli, &mut topo)?;
            let (source, f) = match (field, snapshot) {
                (Some(e), _) => (e.to_string(), e.build(TorusGrid::new(*resolution)?)?),
                (None, Some(p)) => (
                    format!("{}#{component}", p.display()),
                    Snapshot::load(p)?.solenoidal(component)?,
                ),
                (None, None) => return Err(Error::Config("topology needs --field or --snapshot".into())),
            };
            let report = topology_report(source, &f, &topo)?;
            create_dir(&out)?;
            write_json(&out.join("topology.json"), &report)?;
            print_json(&report)?;
            Ok(EXIT_OK)
        }
        Command::Sweep => sweep(cli, &out),
        cmd => {
            let scenario = cmd.scenario().expect("scenario command");
            let cfg = load_experiment(cli, Some(scenario))?;
            let report = run_scenario(&cfg)?;
            finish_scenario(cli, &out, &report)
        }
    }
}

fn finish_scenario(cli: &Cli, out: &Path, report: &ScenarioReport) -> Result<i32> {
    write_outputs(out, report, cli.emit_plots)?;
    let (v, e) = (report.verdict(), report.expected_verdict());
    let summary = serde_json::json!({
        "verdict": v,
        "expected_verdict": e,
        "report": out.join("report.json"),
    });
    println!("{summary}");
    Ok(exit_for(v, e))
}

/// `report.json`, `diagnostics.ndjson` and optionally plot files.
pub fn write_outputs(dir: &Path, report: &ScenarioReport, emit_plots: bool) -> Result<()> {
    create_dir(dir)?;
    write_json(&dir.join("report.json"), report)?;
    let diag = dir.join("diagnostics.ndjson");
    let mut file = std::io::BufWriter::new(std::fs::File::create(&diag).map_err(|e| Error::io(&diag, e))?);
    write_ndjson(report.diagnostics(), &mut file)?;
    if emit_plots {
        write_plots(&dir.join("plots"), &report.plot_series())?;
    }
    Ok(())
}

fn load_topology_config(path: &Path) -> Result<TopologyConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let cfg: TopologyConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        Error::Config(format!(
            "{}: line {}, column {}, field '{}': {inner}",
            path.display(),
            inner.line(),
            inner.column(),
            e.path()
        ))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// Output of the `topology` command.
#[derive(Clone, Debug, Serialize)]
pub struct TopologyReport {
    pub source: String,
    pub resolution: usize,
    pub signature: TopologySignature,
    pub critical_points: Vec<CriticalPoint>,
    pub failed_seeds: Vec<SeedFailure>,
    pub connections: ConnectionReport,
    pub config: TopologyConfig,
}

pub fn topology_report(source: String, f: &SpectralField2D, cfg: &TopologyConfig) -> Result<TopologyReport> {
    let a = analyze_topology(f, cfg)?;
    Ok(TopologyReport {
        source,
        resolution: f.grid().resolution(),
        signature: a.signature,
        critical_points: a.critical.points,
        failed_seeds: a.critical.failures,
        connections: a.connections,
        config: cfg.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
struct SweepEntry {
    index: usize,
    scenario: Option<Scenario>,
    dir: PathBuf,
    verdict: Option<Verdict>,
    expected_verdict: Option<Verdict>,
    error: Option<String>,
}

fn sweep(cli: &Cli, out: &Path) -> Result<i32> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs --config with a list of runs".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| {
        Error::Config(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })?;
    let runs = match v {
        Value::Array(a) => a,
        Value::Object(mut o) => match o.remove("runs") {
            Some(Value::Array(a)) => a,
            _ => return Err(Error::Config(format!("{}: expected an array or {{\"runs\": [...]}}", path.display()))),
        },
        _ => return Err(Error::Config(format!("{}: expected an array of configs", path.display()))),
    };
    // resolve everything up front so a bad entry fails before any run starts
    let mut cfgs = Vec::with_capacity(runs.len());
    for (i, r) in runs.into_iter().enumerate() {
        let mut cfg = ExperimentConfig::resolve(None, r)
            .map_err(|e| Error::Config(format!("{} run {i}: {e}", path.display())))?;
        apply_seed_grid(cli, &mut cfg.topology)?;
        cfgs.push(cfg);
    }
    create_dir(out)?;
    let entries: Vec<SweepEntry> = crate::par::map_range(cfgs.len(), |i| {
        let cfg = &cfgs[i];
        let dir = out.join(format!("run-{i:03}-{}", cfg.scenario.name()));
        let mut entry = SweepEntry {
            index: i,
            scenario: Some(cfg.scenario),
            dir: dir.clone(),
            verdict: None,
            expected_verdict: None,
            error: None,
        };
        match run_scenario(cfg).and_then(|r| write_outputs(&dir, &r, cli.emit_plots).map(|_| r)) {
            Ok(r) => {
                entry.verdict = Some(r.verdict());
                entry.expected_verdict = Some(r.expected_verdict());
            }
            Err(e) => entry.error = Some(e.to_string()),
        }
        entry
    });
    write_json(&out.join("sweep.json"), &entries)?;
    print_json(&entries)?;
    let code = if entries.iter().any(|e| e.error.is_some()) {
        EXIT_FAILURE
    } else if entries.iter().any(|e| e.verdict != e.expected_verdict) {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    };
    Ok(code)
}
