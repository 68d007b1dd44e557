//! Scenario drivers, persistence formats and the command-line front end.

pub mod cli;
mod config;
mod diagnostics;
mod fieldspec;
mod plots;
mod scenarios;
mod snapshot;

pub use config::{ExperimentConfig, Scenario, Verdict};
pub use diagnostics::{read_ndjson, write_ndjson, DiagnosticsRecord, DiagnosticsSink};
pub use fieldspec::FieldExpr;
pub use plots::{format_dat, gnuplot_script, write_plots};
pub use scenarios::{
    run_custom, run_frozen_in, run_remark2, run_scenario, run_stability_decay, run_theorem1, run_theorem2,
    summarize_topology, CustomReport, FrozenInReport, PlotSeries, Remark2Report, ScenarioReport, StabilityReport,
    Theorem1Report, Theorem2Report, TopologySummary,
};
pub use snapshot::{Snapshot, SnapshotHeader, SnapshotSink, FORMAT_VERSION};
