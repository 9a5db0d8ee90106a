//! Sign/exponent/mantissa value set, the floating-point model.
//!
//! Every exponent field value, including all ones, encodes a normal magnitude
//! `(1 + f / 2^t) * 2^(E - bias)` with `bias = 2^(e-1) - 1`. There are no
//! denormals, infinities or NaNs; a single distinguished zero atom is added so
//! that the origin is representable. Out-of-range inputs saturate to the
//! largest magnitude.

use crate::error::{Error, Result};
use crate::lattices::axis::Axis;
use crate::scheme::{AtomCount, AtomId, Delta, QuantizationScheme};
use crate::types::{DomainBox, Vector};

const MAX_EXPONENT_BITS: u32 = 10;
const MAX_PATTERN_BITS: u32 = 22;

#[derive(Clone, Debug, PartialEq)]
pub struct LogarithmicLattice {
    dim: usize,
    exponent_bits: u32,
    mantissa_bits: u32,
    bias: i32,
    axis: Axis,
    domain: DomainBox,
}

pub fn build_logarithmic(dim: usize, exponent_bits: u32, mantissa_bits: u32) -> Result<LogarithmicLattice> {
    LogarithmicLattice::new(dim, exponent_bits, mantissa_bits)
}

impl LogarithmicLattice {
    pub fn new(dim: usize, exponent_bits: u32, mantissa_bits: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidScheme("dimension must be >= 1".into()));
        }
        if !(1..=MAX_EXPONENT_BITS).contains(&exponent_bits) {
            return Err(Error::InvalidScheme(format!(
                "exponent bits must be in [1, {MAX_EXPONENT_BITS}], got {exponent_bits}"
            )));
        }
        if 1 + exponent_bits + mantissa_bits > MAX_PATTERN_BITS {
            return Err(Error::InvalidScheme(format!(
                "1 + {exponent_bits} + {mantissa_bits} bits exceeds the {MAX_PATTERN_BITS}-bit limit"
            )));
        }
        let bias = (1i32 << (exponent_bits - 1)) - 1;
        let mut values = Vec::with_capacity(1usize << (1 + exponent_bits + mantissa_bits) | 1);
        for exponent in 0..1u32 << exponent_bits {
            for fraction in 0..1u32 << mantissa_bits {
                let m = magnitude(exponent, fraction, mantissa_bits, bias);
                values.push(m);
                values.push(-m);
            }
        }
        values.push(0.0);
        values.sort_by(f64::total_cmp);
        let axis = Axis::new(values);
        let vmax = axis.max();
        Ok(LogarithmicLattice {
            dim,
            exponent_bits,
            mantissa_bits,
            bias,
            domain: DomainBox::cube(dim, -vmax, vmax)?,
            axis,
        })
    }

    /// Total bits per coordinate, counting the sign bit.
    pub fn bit_width(&self) -> u32 {
        1 + self.exponent_bits + self.mantissa_bits
    }

    pub fn exponent_bits(&self) -> u32 {
        self.exponent_bits
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn bias(&self) -> i32 {
        self.bias
    }

    /// Largest representable magnitude.
    pub fn max_value(&self) -> f64 {
        self.axis.max()
    }

    pub fn axis_values(&self) -> &[f64] {
        self.axis.values()
    }

    /// Decode a `1 + e + t` bit pattern laid out as `sign | exponent | mantissa`
    /// (sign in the most significant position).
    pub fn decode(&self, pattern: u32) -> f64 {
        let t = self.mantissa_bits;
        let e = self.exponent_bits;
        let fraction = pattern & ((1 << t) - 1);
        let exponent = (pattern >> t) & ((1 << e) - 1);
        let negative = (pattern >> (t + e)) & 1 == 1;
        let m = magnitude(exponent, fraction, t, self.bias);
        if negative {
            -m
        } else {
            m
        }
    }

    /// Largest distance from a scalar in `[-vmax, vmax]` to its nearest value.
    pub fn max_half_gap(&self) -> f64 {
        self.axis.max_half_gap()
    }
}

/// `(2^t + f) * 2^(E - bias - t)`, exact in binary floating point.
fn magnitude(exponent: u32, fraction: u32, mantissa_bits: u32, bias: i32) -> f64 {
    let significand = ((1u64 << mantissa_bits) + fraction as u64) as f64;
    significand * 2f64.powi(exponent as i32 - bias - mantissa_bits as i32)
}

impl QuantizationScheme for LogarithmicLattice {
    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn atom_count(&self) -> AtomCount {
        AtomCount::new(vec![self.axis.len() as u64; self.dim])
    }

    fn nearest(&self, x: &[f64]) -> AtomId {
        AtomId::from_digits(x.iter().map(|&v| self.axis.nearest(v)).collect())
    }

    fn restoration_of(&self, id: &AtomId) -> Option<Vector> {
        self.axis.restore(self.dim, id)
    }

    /// Largest per-axis half gap (between the two largest magnitudes),
    /// composed over `d` axes.
    fn delta(&self) -> Delta {
        Delta::Exact(self.axis.max_half_gap() * (self.dim as f64).sqrt())
    }

    fn zero_atom(&self) -> Option<AtomId> {
        self.axis.zero_atom(self.dim)
    }

    fn atom_at(&self, ordinal: u64) -> Option<AtomId> {
        self.axis.atom_at(self.dim, ordinal)
    }

    fn describe(&self) -> String {
        format!(
            "logarithmic(d={},exp={},mant={})",
            self.dim, self.exponent_bits, self.mantissa_bits
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_one_examples() {
        let s = build_logarithmic(1, 3, 1).unwrap();
        assert_eq!(s.bias(), 3);
        assert_eq!(s.quantize(&[0.8]).unwrap().restoration()[0], 0.75);
        assert_eq!(s.quantize(&[1e9]).unwrap().restoration()[0], 24.0);
        assert_eq!(s.quantize(&[-1e9]).unwrap().restoration()[0], -24.0);
        assert_eq!(s.quantize(&[0.0]).unwrap().restoration()[0], 0.0);
        assert_eq!(s.max_value(), 24.0);
        assert_eq!(s.delta(), Delta::Exact(4.0));
    }

    #[test]
    fn cardinality() {
        for e in 1..5 {
            for t in 0..4 {
                let s = build_logarithmic(1, e, t).unwrap();
                assert_eq!(s.axis_values().len(), (1usize << (e + t + 1)) + 1);
            }
        }
    }

    #[test]
    fn rejects_out_of_range_widths() {
        assert!(build_logarithmic(1, 0, 3).is_err());
        assert!(build_logarithmic(1, 11, 0).is_err());
        assert!(build_logarithmic(1, 8, 20).is_err());
        assert!(build_logarithmic(0, 3, 1).is_err());
    }

    #[test]
    fn zero_atom_is_the_middle() {
        let s = build_logarithmic(2, 2, 2).unwrap();
        let z = s.zero_atom().unwrap();
        let mid = (s.axis_values().len() / 2) as u32;
        assert_eq!(z.digits(), &[mid, mid]);
    }
}
