//! Evenly spaced grid per dimension, the fixed-point model.

use crate::error::{Error, Result};
use crate::lattices::axis::Axis;
use crate::scheme::{AtomCount, AtomId, Delta, QuantizationScheme};
use crate::types::{DomainBox, Vector};

const MAX_POINTS: usize = 1 << 24;

/// `{lo + i*step : 0 <= i < n}^d` with `step = (hi - lo) / (n - 1)`; both
/// endpoints are atoms and `M = [lo, hi]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularLattice {
    dim: usize,
    points: usize,
    lo: f64,
    hi: f64,
    step: f64,
    axis: Axis,
    domain: DomainBox,
}

pub fn build_regular(dim: usize, points: usize, lo: f64, hi: f64) -> Result<RegularLattice> {
    RegularLattice::new(dim, points, lo, hi)
}

impl RegularLattice {
    pub fn new(dim: usize, points: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidScheme("dimension must be >= 1".into()));
        }
        if points < 2 {
            return Err(Error::InvalidScheme(format!("need at least 2 points per dimension, got {points}")));
        }
        if points > MAX_POINTS {
            return Err(Error::InvalidScheme(format!("at most {MAX_POINTS} points per dimension")));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidScheme(format!("range [{lo}, {hi}] is empty or not finite")));
        }
        let step = (hi - lo) / (points - 1) as f64;
        let last = points - 1;
        // Fill from both ends so a symmetric range gives an exactly symmetric axis.
        let mut values: Vec<f64> = (0..points)
            .map(|i| {
                if 2 * i <= last {
                    lo + i as f64 * step
                } else {
                    hi - (last - i) as f64 * step
                }
            })
            .collect();
        if lo == -hi && last % 2 == 0 {
            values[last / 2] = 0.0;
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidScheme("step underflows f64 resolution".into()));
        }
        Ok(RegularLattice {
            dim,
            points,
            lo,
            hi,
            step,
            axis: Axis::new(values),
            domain: DomainBox::cube(dim, lo, hi)?,
        })
    }

    pub fn points_per_dim(&self) -> usize {
        self.points
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// The representable scalars along one axis, ascending.
    pub fn axis_values(&self) -> &[f64] {
        self.axis.values()
    }

    /// Closed Voronoi interval of the `i`-th axis value, cut to `[lo, hi]`.
    pub fn cell_interval(&self, i: usize) -> (f64, f64) {
        let v = self.axis.values();
        let left = if i == 0 { self.lo } else { (v[i - 1] + v[i]) / 2.0 };
        let right = if i + 1 == v.len() { self.hi } else { (v[i] + v[i + 1]) / 2.0 };
        (left, right)
    }
}

impl QuantizationScheme for RegularLattice {
    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn atom_count(&self) -> AtomCount {
        AtomCount::new(vec![self.points as u64; self.dim])
    }

    fn nearest(&self, x: &[f64]) -> AtomId {
        let last = (self.points - 1) as f64;
        let digits = x
            .iter()
            .map(|&v| {
                let guess = ((v - self.lo) / self.step).round().clamp(0.0, last) as usize;
                self.axis.nearest_from(v, guess)
            })
            .collect();
        AtomId::from_digits(digits)
    }

    fn restoration_of(&self, id: &AtomId) -> Option<Vector> {
        self.axis.restore(self.dim, id)
    }

    /// `(step / 2) * sqrt(d)`: the worst point is a cell center.
    fn delta(&self) -> Delta {
        Delta::Exact(self.step / 2.0 * (self.dim as f64).sqrt())
    }

    fn zero_atom(&self) -> Option<AtomId> {
        self.axis.zero_atom(self.dim)
    }

    fn atom_at(&self, ordinal: u64) -> Option<AtomId> {
        self.axis.atom_at(self.dim, ordinal)
    }

    fn describe(&self) -> String {
        format!("regular(d={},n={},[{},{}])", self.dim, self.points, self.lo, self.hi)
    }
}
