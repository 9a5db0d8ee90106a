//! Arbitrary atom table with exact nearest-neighbor quantization.

use std::collections::HashSet;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scheme::{AtomCount, AtomId, Delta, QuantizationScheme};
use crate::types::{self, DomainBox, Vector};

pub const DEFAULT_DELTA_SAMPLES: usize = 1_000_000;
const DELTA_SEED: u64 = 0x5eed_de17a;

#[derive(Debug)]
pub struct LookupLattice {
    table: Vec<Vector>,
    domain: DomainBox,
    delta_samples: usize,
    delta: OnceLock<Delta>,
}

impl Clone for LookupLattice {
    fn clone(&self) -> Self {
        LookupLattice {
            table: self.table.clone(),
            domain: self.domain.clone(),
            delta_samples: self.delta_samples,
            delta: self.delta.clone(),
        }
    }
}

/// Table-backed scheme whose domain is the table's bounding box widened by
/// `halo` on every side.
pub fn build_lookup(table: Vec<Vector>, halo: f64) -> Result<LookupLattice> {
    LookupLattice::new(table, halo)
}

impl LookupLattice {
    pub fn new(table: Vec<Vector>, halo: f64) -> Result<Self> {
        if !(halo.is_finite() && halo >= 0.0) {
            return Err(Error::InvalidScheme(format!("halo must be finite and >= 0, got {halo}")));
        }
        let dim = check_table(&table)?;
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for row in &table {
            for k in 0..dim {
                lo[k] = lo[k].min(row[k]);
                hi[k] = hi[k].max(row[k]);
            }
        }
        for k in 0..dim {
            lo[k] -= halo;
            hi[k] += halo;
        }
        let domain = DomainBox::new(lo, hi).map_err(|e| {
            Error::InvalidScheme(format!("table spans a degenerate box, use a positive halo ({e})"))
        })?;
        Ok(Self::assemble(table, domain))
    }

    /// Table-backed scheme on an explicit domain that must contain every row.
    pub fn with_domain(table: Vec<Vector>, domain: DomainBox) -> Result<Self> {
        let dim = check_table(&table)?;
        if domain.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: domain.dim(),
            });
        }
        if let Some(i) = table.iter().position(|r| !domain.contains(r)) {
            return Err(Error::InvalidScheme(format!("table row {i} lies outside the domain")));
        }
        Ok(Self::assemble(table, domain))
    }

    fn assemble(table: Vec<Vector>, domain: DomainBox) -> Self {
        LookupLattice {
            table,
            domain,
            delta_samples: DEFAULT_DELTA_SAMPLES,
            delta: OnceLock::new(),
        }
    }

    /// Override the Monte Carlo budget used by [`QuantizationScheme::delta`].
    pub fn with_delta_samples(mut self, samples: usize) -> Self {
        self.delta_samples = samples.max(1);
        self.delta = OnceLock::new();
        self
    }

    pub fn table(&self) -> &[Vector] {
        &self.table
    }

    /// Bits needed to index every row.
    pub fn bit_width(&self) -> u32 {
        (self.table.len() as u64).next_power_of_two().trailing_zeros()
    }

    fn estimate_delta(&self) -> Delta {
        let mut rng = ChaCha8Rng::seed_from_u64(DELTA_SEED);
        let mut worst = 0.0f64;
        let mut probe = |x: &[f64]| {
            let id = self.nearest(x);
            let d = types::distance(x, &self.table[id.digits()[0] as usize]);
            worst = worst.max(d);
        };
        let dim = self.domain.dim();
        if dim <= 16 {
            for mask in 0..1u64 << dim {
                probe(&self.domain.corner(mask));
            }
        }
        for _ in 0..self.delta_samples {
            probe(&self.domain.sample(&mut rng));
        }
        Delta::Estimated {
            value: worst,
            samples: self.delta_samples,
        }
    }
}

fn check_table(table: &[Vector]) -> Result<usize> {
    let first = table
        .first()
        .ok_or_else(|| Error::InvalidScheme("lookup table must not be empty".into()))?;
    if table.len() > u32::MAX as usize {
        return Err(Error::InvalidScheme("lookup table too large".into()));
    }
    let dim = first.dim();
    let mut seen = HashSet::with_capacity(table.len());
    for (i, row) in table.iter().enumerate() {
        if row.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: row.dim(),
            });
        }
        // +0.0 and -0.0 are the same point
        let key: Vec<u64> = row.iter().map(|v| (v + 0.0).to_bits()).collect();
        if !seen.insert(key) {
            return Err(Error::InvalidScheme(format!("duplicate table row {i}: {row}")));
        }
    }
    Ok(dim)
}

impl QuantizationScheme for LookupLattice {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn atom_count(&self) -> AtomCount {
        AtomCount::new(vec![self.table.len() as u64])
    }

    fn nearest(&self, x: &[f64]) -> AtomId {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, row) in self.table.iter().enumerate() {
            let d = types::squared_distance(x, row);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        AtomId::single(best as u32)
    }

    fn restoration_of(&self, id: &AtomId) -> Option<Vector> {
        match id.digits() {
            [i] => self.table.get(*i as usize).cloned(),
            _ => None,
        }
    }

    /// Monte Carlo estimate over the domain (plus its corners when `d <= 16`),
    /// computed once and cached.
    fn delta(&self) -> Delta {
        *self.delta.get_or_init(|| self.estimate_delta())
    }

    fn zero_atom(&self) -> Option<AtomId> {
        self.table
            .iter()
            .position(|r| r.is_zero())
            .map(|i| AtomId::single(i as u32))
    }

    fn atom_at(&self, ordinal: u64) -> Option<AtomId> {
        (ordinal < self.table.len() as u64).then(|| AtomId::single(ordinal as u32))
    }

    fn describe(&self) -> String {
        format!("lookup(d={},m={})", self.dim(), self.table.len())
    }
}
