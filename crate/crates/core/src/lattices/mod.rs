//! Concrete quantization schemes and their error parameter.

mod axis;
pub mod logarithmic;
pub mod lookup;
pub mod regular;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use logarithmic::{build_logarithmic, LogarithmicLattice};
pub use lookup::{build_lookup, LookupLattice};
pub use regular::{build_regular, RegularLattice};

use crate::error::{Error, Result};
use crate::scheme::{Delta, QuantizationScheme};

/// The error parameter of `scheme`: exact for the product lattices, a
/// flagged Monte Carlo estimate for lookup tables.
pub fn compute_delta(scheme: &dyn QuantizationScheme) -> Delta {
    scheme.delta()
}

/// Serializable description of a scheme.
///
/// The flat text form is a whitespace-separated list of `key=value` pairs
/// starting with `kind`, e.g. `kind=regular dim=2 points=4 lo=-1 hi=1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchemeSpec {
    Regular {
        dim: usize,
        points: usize,
        lo: f64,
        hi: f64,
    },
    Logarithmic {
        dim: usize,
        exponent_bits: u32,
        mantissa_bits: u32,
    },
    Lookup {
        /// CSV file, one atom per row.
        table: PathBuf,
        #[serde(default)]
        halo: f64,
    },
}

impl SchemeSpec {
    pub fn build(&self) -> Result<Box<dyn QuantizationScheme>> {
        Ok(match self {
            SchemeSpec::Regular { dim, points, lo, hi } => Box::new(build_regular(*dim, *points, *lo, *hi)?),
            SchemeSpec::Logarithmic {
                dim,
                exponent_bits,
                mantissa_bits,
            } => Box::new(build_logarithmic(*dim, *exponent_bits, *mantissa_bits)?),
            SchemeSpec::Lookup { table, halo } => {
                let rows = crate::data::csv::read_table(table)?;
                Box::new(build_lookup(rows, *halo)?)
            }
        })
    }

    pub fn parse_flat(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for tok in text.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{tok}`")))?;
            if kv.insert(k, v).is_some() {
                return Err(Error::Config(format!("duplicate key `{k}`")));
            }
        }
        fn take<'a>(kv: &mut BTreeMap<&str, &'a str>, key: &str) -> Result<&'a str> {
            kv.remove(key)
                .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
        }
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("bad value for `{key}`: `{v}`")))
        }
        let kind = take(&mut kv, "kind")?;
        let spec = match kind {
            "regular" => SchemeSpec::Regular {
                dim: num("dim", take(&mut kv, "dim")?)?,
                points: num("points", take(&mut kv, "points")?)?,
                lo: num("lo", take(&mut kv, "lo")?)?,
                hi: num("hi", take(&mut kv, "hi")?)?,
            },
            "logarithmic" => SchemeSpec::Logarithmic {
                dim: num("dim", take(&mut kv, "dim")?)?,
                exponent_bits: num("exponent_bits", take(&mut kv, "exponent_bits")?)?,
                mantissa_bits: num("mantissa_bits", take(&mut kv, "mantissa_bits")?)?,
            },
            "lookup" => SchemeSpec::Lookup {
                table: PathBuf::from(take(&mut kv, "table")?),
                halo: match kv.remove("halo") {
                    Some(h) => num("halo", h)?,
                    None => 0.0,
                },
            },
            other => return Err(Error::Config(format!("unknown scheme kind `{other}`"))),
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::Config(format!("unknown key `{k}` for kind {kind}")));
        }
        Ok(spec)
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Regular { dim, points, lo, hi } => {
                write!(f, "kind=regular dim={dim} points={points} lo={lo} hi={hi}")
            }
            SchemeSpec::Logarithmic {
                dim,
                exponent_bits,
                mantissa_bits,
            } => write!(
                f,
                "kind=logarithmic dim={dim} exponent_bits={exponent_bits} mantissa_bits={mantissa_bits}"
            ),
            SchemeSpec::Lookup { table, halo } => {
                write!(f, "kind=lookup table={} halo={halo}", table.display())
            }
        }
    }
}
