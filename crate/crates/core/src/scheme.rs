//! The quantization contract shared by every lattice.
//!
//! A scheme owns a finite atom set `A`, a domain box `M` containing every atom,
//! a quantizer `q` and a restoration `r`. Quantization clamps the input into
//! `M` and returns the atom whose restoration is nearest in Euclidean norm,
//! breaking ties toward the smallest [`AtomId`]. Atoms restore without error,
//! so `q(r(a)) = a` for every atom.

use std::fmt;

use crate::error::{Error, Result};
use crate::types::{self, DomainBox, Vector};

/// Identifies one atom.
///
/// Product lattices use one digit per dimension (the index of the coordinate
/// along that axis), table-backed schemes use a single digit (the row).
/// Ordering is lexicographic over digits, which for product lattices is the
/// lexicographic order of the restored coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(Vec<u32>);

impl AtomId {
    pub fn from_digits(digits: Vec<u32>) -> Self {
        AtomId(digits)
    }

    pub fn single(index: u32) -> Self {
        AtomId(vec![index])
    }

    pub fn digits(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [single] = self.0.as_slice() {
            return write!(f, "{single}");
        }
        f.write_str("(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str(")")
    }
}

/// An atom together with its cached restoration.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    id: AtomId,
    restoration: Vector,
}

impl Atom {
    pub(crate) fn new(id: AtomId, restoration: Vector) -> Self {
        Atom { id, restoration }
    }

    pub fn id(&self) -> &AtomId {
        &self.id
    }

    pub fn restoration(&self) -> &Vector {
        &self.restoration
    }

    pub fn into_restoration(self) -> Vector {
        self.restoration
    }
}

/// `|A|` as a product of radices; may exceed `u64` (e.g. 256^112).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomCount {
    radices: Vec<u64>,
}

impl AtomCount {
    pub fn new(radices: Vec<u64>) -> Self {
        AtomCount { radices }
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }

    /// Exact count, or `None` on overflow.
    pub fn total(&self) -> Option<u64> {
        self.radices.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r))
    }

    pub fn log2(&self) -> f64 {
        self.radices.iter().map(|&r| (r as f64).log2()).sum()
    }

    pub fn as_f64(&self) -> f64 {
        self.radices.iter().map(|&r| r as f64).product()
    }
}

impl fmt::Display for AtomCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.total() {
            Some(t) => write!(f, "{t}"),
            None => write!(f, "2^{:.2}", self.log2()),
        }
    }
}

/// The error parameter `max_{x in M} |x - r(q(x))|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Delta {
    /// Closed form.
    Exact(f64),
    /// Monte Carlo lower estimate of the maximum over `samples` probes.
    Estimated { value: f64, samples: usize },
}

impl Delta {
    pub fn value(&self) -> f64 {
        match *self {
            Delta::Exact(v) => v,
            Delta::Estimated { value, .. } => value,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Delta::Exact(_))
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Exact(v) => write!(f, "{v}"),
            Delta::Estimated { value, samples } => write!(f, "{value} (estimate, {samples} samples)"),
        }
    }
}

/// A quantization of `R^d`: atom set, quantizer and restoration.
///
/// Implementors provide the raw nearest-atom search on in-domain points; the
/// provided methods add validation and saturation.
pub trait QuantizationScheme: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn domain(&self) -> &DomainBox;

    fn atom_count(&self) -> AtomCount;

    /// Nearest atom to `x`, which is finite, of the right dimension and
    /// inside the domain. Ties go to the smallest id.
    fn nearest(&self, x: &[f64]) -> AtomId;

    /// Restoration of `id`, or `None` when `id` is not an atom of this scheme.
    fn restoration_of(&self, id: &AtomId) -> Option<Vector>;

    fn delta(&self) -> Delta;

    /// The atom restoring exactly to the origin, if there is one.
    fn zero_atom(&self) -> Option<AtomId>;

    /// The `ordinal`-th atom in id order.
    fn atom_at(&self, ordinal: u64) -> Option<AtomId>;

    /// Short human-readable description, e.g. `regular(d=2,n=4,[-1,1])`.
    fn describe(&self) -> String;

    fn quantize(&self, x: &[f64]) -> Result<Atom> {
        self.check_input(x)?;
        let clamped = self.domain().clamp(x);
        let id = self.nearest(&clamped);
        let restoration = self
            .restoration_of(&id)
            .expect("nearest() returned an id outside the atom set");
        Ok(Atom::new(id, restoration))
    }

    fn restore(&self, id: &AtomId) -> Result<Vector> {
        self.restoration_of(id)
            .ok_or_else(|| Error::AtomOutOfRange(id.to_string()))
    }

    /// `|x - r(q(x))|`.
    fn round_trip_error(&self, x: &[f64]) -> Result<f64> {
        let a = self.quantize(x)?;
        Ok(types::distance(x, a.restoration()))
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        types::check_finite(x)
    }
}

/// Every atom in id order, when there are at most `limit` of them.
pub fn enumerate_atoms(scheme: &dyn QuantizationScheme, limit: u64) -> Option<Vec<AtomId>> {
    let total = scheme.atom_count().total()?;
    if total > limit {
        return None;
    }
    Some((0..total).filter_map(|k| scheme.atom_at(k)).collect())
}
