//! One sorted axis of representable scalars, shared by the product lattices.

use crate::scheme::AtomId;
use crate::types::Vector;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Axis {
    values: Vec<f64>,
}

impl Axis {
    /// `values` must be strictly increasing and finite.
    pub(crate) fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] < w[1]));
        Axis { values }
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }

    pub(crate) fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Index of the nearest value; among equidistant values the smaller index
    /// wins. `guess` need only be within one of the answer.
    pub(crate) fn nearest_from(&self, x: f64, guess: usize) -> u32 {
        let last = self.values.len() - 1;
        let lo = guess.saturating_sub(1);
        let hi = (guess + 1).min(last);
        let mut best = lo;
        let mut best_d = (x - self.values[lo]).abs();
        for i in lo + 1..=hi {
            let d = (x - self.values[i]).abs();
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best as u32
    }

    pub(crate) fn nearest(&self, x: f64) -> u32 {
        // first index with value >= x; the answer is it or its predecessor
        let p = self.values.partition_point(|&v| v < x);
        self.nearest_from(x, p.min(self.values.len() - 1))
    }

    /// Largest distance from any point of `[min, max]` to its nearest value.
    pub(crate) fn max_half_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]) / 2.0)
            .fold(0.0, f64::max)
    }

    pub(crate) fn position_of(&self, v: f64) -> Option<u32> {
        let p = self.values.partition_point(|&x| x < v);
        (p < self.values.len() && self.values[p] == v).then_some(p as u32)
    }

    pub(crate) fn restore(&self, dim: usize, id: &AtomId) -> Option<Vector> {
        let digits = id.digits();
        if digits.len() != dim {
            return None;
        }
        let mut out = Vec::with_capacity(dim);
        for &d in digits {
            out.push(*self.values.get(d as usize)?);
        }
        Some(Vector::from_vec_unchecked(out))
    }

    /// Mixed-radix decode with the first coordinate most significant.
    pub(crate) fn atom_at(&self, dim: usize, ordinal: u64) -> Option<AtomId> {
        let n = self.values.len() as u64;
        let mut digits = vec![0u32; dim];
        let mut rest = ordinal;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % n) as u32;
            rest /= n;
        }
        (rest == 0).then(|| AtomId::from_digits(digits))
    }

    pub(crate) fn zero_atom(&self, dim: usize) -> Option<AtomId> {
        self.position_of(0.0)
            .map(|p| AtomId::from_digits(vec![p; dim]))
    }
}
