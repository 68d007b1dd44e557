//! Critical points, separatrices and structural stability of planar
//! divergence-free fields, plus flow maps of recorded velocities.

mod config;
mod connections;
mod critical;
mod flow;
mod trace;

pub use config::TopologyConfig;
pub use connections::{
    analyze_topology, detect_saddle_connections, is_structurally_stable, is_structurally_stable_with,
    signatures_equivalent, ConnectionReport, Equivalence, SaddleConnection, TopologyAnalysis, TopologySignature,
};
pub use critical::{classify, det2, find_critical_points, CriticalPoint, CriticalPointSet, PointKind, SeedFailure};
pub use flow::{flow_map, seed_lattice, steady_flow_map, verify_frozen_in, FlowMapSample, VelocityHistory};
pub use trace::{trace_integral_line, trace_integral_line_with, IntegralLine, TraceEnd};
