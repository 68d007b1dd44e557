//! Textual field descriptions such as `0.25*taylor:4,4 + 1e-3*tilde1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{SpectralField2D, TaylorMode, TorusGrid};

/// Linear combination of Taylor modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FieldExpr {
    pub terms: Vec<(f64, TaylorMode)>,
}

impl FieldExpr {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn build(&self, grid: TorusGrid) -> Result<SpectralField2D> {
        let mut out = SpectralField2D::zeros(grid);
        for &(c, mode) in &self.terms {
            out.axpy(c, &mode.field(1.0, grid)?);
        }
        Ok(out)
    }
}

fn parse_mode(s: &str) -> Result<TaylorMode> {
    let bad = || Error::Input(format!("unknown field term '{s}' (expected taylor:n,m or tilde1)"));
    if s == "tilde1" {
        return Ok(TaylorMode::Tilde1);
    }
    let rest = s.strip_prefix("taylor:").ok_or_else(bad)?;
    let (n, m) = rest.split_once(',').ok_or_else(bad)?;
    let n: u32 = n.trim().parse().map_err(|_| bad())?;
    let m: u32 = m.trim().parse().map_err(|_| bad())?;
    if n == 0 || m == 0 {
        return Err(Error::Input(format!("Taylor wavenumbers must be positive in '{s}'")));
    }
    Ok(TaylorMode::Nm { n, m })
}

impl FromStr for FieldExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "zero" {
            return Ok(Self::zero());
        }
        let terms = s
            .split('+')
            .map(|t| {
                let t = t.trim();
                match t.split_once('*') {
                    Some((c, m)) => {
                        let c: f64 = c
                            .trim()
                            .parse()
                            .map_err(|_| Error::Input(format!("bad coefficient in '{t}'")))?;
                        Ok((c, parse_mode(m.trim())?))
                    }
                    None => Ok((1.0, parse_mode(t)?)),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { terms })
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "zero");
        }
        for (i, (c, mode)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match mode {
                TaylorMode::Nm { n, m } => write!(f, "{c:?}*taylor:{n},{m}")?,
                TaylorMode::Tilde1 => write!(f, "{c:?}*tilde1")?,
            }
        }
        Ok(())
    }
}

impl TryFrom<String> for FieldExpr {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FieldExpr> for String {
    fn from(e: FieldExpr) -> String {
        e.to_string()
    }
}
