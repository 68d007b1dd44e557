use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{sobolev_norm, SpectralField2D};
use crate::solver::{MHDState, StateSink};
use crate::topology::{analyze_topology, TopologyConfig, TopologySignature};

/// One line of the diagnostics stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub t: f64,
    /// `|u|^2_{L^2}`.
    pub u_l2_sq: f64,
    /// `|b|^2_{L^2}`.
    pub b_l2_sq: f64,
    pub cross_helicity: f64,
    /// `H^r` norms for `r = 0..=r_max`, keyed by field name.
    pub sobolev: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<TopologySignature>,
}

type Extra<'a> = Box<dyn Fn(&MHDState) -> Vec<(String, SpectralField2D)> + 'a>;

/// Builds a [`DiagnosticsRecord`] for every observed state.
pub struct DiagnosticsSink<'a> {
    r_max: u32,
    cadence: Option<usize>,
    extra: Option<Extra<'a>>,
    topology: Option<(TopologyConfig, usize)>,
    pub records: Vec<DiagnosticsRecord>,
}

impl<'a> DiagnosticsSink<'a> {
    pub fn new(r_max: u32) -> Self {
        Self {
            r_max,
            cadence: None,
            extra: None,
            topology: None,
            records: Vec::new(),
        }
    }

    pub fn with_cadence(mut self, cadence: usize) -> Self {
        self.cadence = Some(cadence.max(1));
        self
    }

    /// Additional named fields whose norms are recorded, e.g. differences
    /// to a reference solution.
    pub fn with_extra(mut self, f: impl Fn(&MHDState) -> Vec<(String, SpectralField2D)> + 'a) -> Self {
        self.extra = Some(Box::new(f));
        self
    }

    /// Attach the magnetic signature to every `every`-th record; 0 disables.
    pub fn with_topology(mut self, cfg: TopologyConfig, every: usize) -> Self {
        if every > 0 {
            self.topology = Some((cfg, every));
        }
        self
    }

    fn norms(&self, f: &SpectralField2D) -> Vec<f64> {
        (0..=self.r_max).map(|r| sobolev_norm(f, r)).collect()
    }
}

impl StateSink for DiagnosticsSink<'_> {
    fn cadence(&self) -> Option<usize> {
        self.cadence
    }

    fn observe(&mut self, step: usize, state: &MHDState) -> Result<()> {
        if let Some(prev) = self.records.last() {
            if state.t <= prev.t {
                return Ok(());
            }
        }
        let mut sobolev = BTreeMap::new();
        sobolev.insert("u".to_string(), self.norms(&state.u));
        sobolev.insert("b".to_string(), self.norms(&state.b));
        if let Some(extra) = &self.extra {
            for (name, f) in extra(state) {
                sobolev.insert(name, self.norms(&f));
            }
        }
        let signature = match &self.topology {
            Some((cfg, every)) if self.records.len() % every == 0 && !state.b.is_zero() => {
                Some(analyze_topology(&state.b, cfg)?.signature)
            }
            _ => None,
        };
        self.records.push(DiagnosticsRecord {
            step,
            t: state.t,
            u_l2_sq: state.u.l2_norm().powi(2),
            b_l2_sq: state.b.l2_norm().powi(2),
            cross_helicity: state.cross_helicity(),
            sobolev,
            signature,
        });
        Ok(())
    }
}

pub fn write_ndjson(records: &[DiagnosticsRecord], w: &mut impl Write) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io("<diagnostics stream>", e))?;
    }
    Ok(())
}

pub fn read_ndjson(r: impl BufRead) -> Result<Vec<DiagnosticsRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<diagnostics stream>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DiagnosticsRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Input(format!("diagnostics line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_tilde_t1, TorusGrid};
    use crate::solver::{simulate, SimConfig};

    #[test]
    fn records_round_trip() {
        let mut cfg = SimConfig::new(0.1, 0.2, 16, 0.01, 0.05);
        cfg.output_cadence = 2;
        let g = TorusGrid::new(16).unwrap();
        let s0 = MHDState::new(make_tilde_t1(g).unwrap().scaled(0.3), make_tilde_t1(g).unwrap(), 0.0).unwrap();
        let b0 = s0.b.clone();
        let mut sink = DiagnosticsSink::new(3)
            .with_extra(move |s| vec![("db".into(), s.b.sub(&b0))])
            .with_topology(TopologyConfig::default(), 2);
        simulate(&cfg, s0, &mut [&mut sink]).unwrap();
        let recs = sink.records;
        assert_eq!(recs.len(), 4);
        assert!(recs.windows(2).all(|w| w[1].t > w[0].t));
        assert_eq!(recs[0].sobolev["db"], vec![0.0; 4]);
        assert!(recs[0].signature.is_some() && recs[1].signature.is_none());
        let mut buf = Vec::new();
        write_ndjson(&recs, &mut buf).unwrap();
        let back = read_ndjson(buf.as_slice()).unwrap();
        assert_eq!(back, recs);
    }
}
