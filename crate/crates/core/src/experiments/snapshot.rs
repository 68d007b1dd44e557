//! Binary snapshots: `MHD2`, a little-endian `u32` format version, a
//! little-endian `u64` header length, a UTF-8 JSON header, then for every
//! named field its two components as `(re, im)` little-endian `f64` pairs in
//! row-major wavenumber order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{SpectralField2D, TorusGrid, VectorSpectrum};
use crate::solver::{MHDState, StateSink};

pub const MAGIC: &[u8; 4] = b"MHD2";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotHeader {
    pub format_version: u32,
    pub time: f64,
    pub nu: f64,
    pub eta: f64,
    pub resolution: usize,
    pub fields: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub data: Vec<VectorSpectrum>,
}

impl Snapshot {
    pub fn new(time: f64, nu: f64, eta: f64, fields: Vec<(String, VectorSpectrum)>) -> Result<Self> {
        let resolution = fields
            .first()
            .map(|(_, f)| f.grid().resolution())
            .ok_or_else(|| Error::Input("snapshot needs at least one field".into()))?;
        if fields.iter().any(|(_, f)| f.grid().resolution() != resolution) {
            return Err(Error::Input("snapshot fields differ in resolution".into()));
        }
        let (names, data) = fields.into_iter().unzip();
        Ok(Self {
            header: SnapshotHeader {
                format_version: FORMAT_VERSION,
                time,
                nu,
                eta,
                resolution,
                fields: names,
            },
            data,
        })
    }

    pub fn from_state(state: &MHDState, nu: f64, eta: f64) -> Self {
        Self::new(
            state.t,
            nu,
            eta,
            vec![
                ("u".into(), state.u.spectrum().clone()),
                ("b".into(), state.b.spectrum().clone()),
            ],
        )
        .expect("a state has two fields on one grid")
    }

    pub fn field(&self, name: &str) -> Option<&VectorSpectrum> {
        self.header
            .fields
            .iter()
            .position(|n| n == name)
            .map(|i| &self.data[i])
    }

    /// Field `name` checked against the divergence-free invariants.
    pub fn solenoidal(&self, name: &str) -> Result<SpectralField2D> {
        let raw = self
            .field(name)
            .ok_or_else(|| Error::Input(format!("snapshot has no field '{name}'")))?;
        SpectralField2D::try_from_spectrum(raw.clone(), 1e-10)
    }

    pub fn to_state(&self) -> Result<MHDState> {
        MHDState::new(self.solenoidal("u")?, self.solenoidal("b")?, self.header.time)
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let header = serde_json::to_vec(&self.header)?;
        let io = |e| Error::io("<snapshot stream>", e);
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&self.header.format_version.to_le_bytes()).map_err(io)?;
        w.write_all(&(header.len() as u64).to_le_bytes()).map_err(io)?;
        w.write_all(&header).map_err(io)?;
        let mut buf = Vec::with_capacity(16 * self.header.resolution.pow(2));
        for f in &self.data {
            for c in 0..2 {
                buf.clear();
                for z in f.component(c) {
                    buf.extend_from_slice(&z.re.to_le_bytes());
                    buf.extend_from_slice(&z.im.to_le_bytes());
                }
                w.write_all(&buf).map_err(io)?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self> {
        fn short(what: &'static str) -> impl Fn(std::io::Error) -> Error {
            move |_| Error::Format(format!("truncated {what}"))
        }
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(short("magic"))?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}")));
        }
        let mut v = [0u8; 4];
        r.read_exact(&mut v).map_err(short("version"))?;
        let version = u32::from_le_bytes(v);
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let mut l = [0u8; 8];
        r.read_exact(&mut l).map_err(short("header length"))?;
        let len = u64::from_le_bytes(l) as usize;
        if len > 1 << 24 {
            return Err(Error::Format(format!("implausible header length {len}")));
        }
        let mut hb = vec![0u8; len];
        r.read_exact(&mut hb).map_err(short("header"))?;
        let header: SnapshotHeader = serde_json::from_slice(&hb)
            .map_err(|e| Error::Format(format!("header: {e}")))?;
        if header.format_version != version {
            return Err(Error::Format("header and preamble versions differ".into()));
        }
        let grid = TorusGrid::new(header.resolution)
            .map_err(|e| Error::Format(format!("header: {e}")))?;
        let n = grid.len();
        let mut bytes = vec![0u8; 16 * n];
        let mut data = Vec::with_capacity(header.fields.len());
        for name in &header.fields {
            let mut comps = Vec::with_capacity(2);
            for _ in 0..2 {
                r.read_exact(&mut bytes)
                    .map_err(|_| Error::Format(format!("truncated payload of '{name}'")))?;
                let comp: Vec<Complex64> = bytes
                    .chunks_exact(16)
                    .map(|c| {
                        Complex64::new(
                            f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                            f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                        )
                    })
                    .collect();
                comps.push(comp);
            }
            let c2 = comps.pop().expect("two components");
            let c1 = comps.pop().expect("two components");
            data.push(VectorSpectrum::from_components(grid, c1, c2)?);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest).map_err(|e| Error::io("<snapshot stream>", e))? != 0 {
            return Err(Error::Format("trailing bytes after payload".into()));
        }
        Ok(Self { header, data })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(&mut BufReader::new(f))
    }
}

/// Writes `snap-<step>.mhd` files into a directory.
pub struct SnapshotSink {
    dir: std::path::PathBuf,
    cadence: usize,
    nu: f64,
    eta: f64,
    pub written: Vec<std::path::PathBuf>,
}

impl SnapshotSink {
    pub fn new(dir: impl Into<std::path::PathBuf>, cadence: usize, nu: f64, eta: f64) -> Self {
        Self {
            dir: dir.into(),
            cadence: cadence.max(1),
            nu,
            eta,
            written: Vec::new(),
        }
    }
}

impl StateSink for SnapshotSink {
    fn cadence(&self) -> Option<usize> {
        Some(self.cadence)
    }

    fn observe(&mut self, step: usize, state: &MHDState) -> Result<()> {
        let path = self.dir.join(format!("snap-{step:08}.mhd"));
        Snapshot::from_state(state, self.nu, self.eta).save(&path)?;
        self.written.push(path);
        Ok(())
    }

    fn finish(&mut self, last: &MHDState) -> Result<()> {
        let path = self.dir.join("last.mhd");
        Snapshot::from_state(last, self.nu, self.eta).save(&path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_taylor, make_tilde_t1, TaylorSpec};

    fn state() -> MHDState {
        let g = TorusGrid::new(8).unwrap();
        let u = make_tilde_t1(g).unwrap().scaled(1.0 / 3.0);
        let b = make_taylor(TaylorSpec::new(1, 2).unwrap(), std::f64::consts::E, g).unwrap();
        MHDState::new(u, b, 0.1 + 0.2).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let s = Snapshot::from_state(&state(), 0.5, 0.25);
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], MAGIC);
        let back = Snapshot::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_state().unwrap(), state());
    }

    #[test]
    fn corrupt_streams_are_rejected() {
        let s = Snapshot::from_state(&state(), 0.5, 0.25);
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(Snapshot::read_from(&mut bad.as_slice()), Err(Error::Format(_))));
        let cut = &buf[..buf.len() - 3];
        assert!(matches!(Snapshot::read_from(&mut &cut[..]), Err(Error::Format(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(Snapshot::read_from(&mut long.as_slice()), Err(Error::Format(_))));
    }
}
