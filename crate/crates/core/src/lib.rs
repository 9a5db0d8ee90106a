//! Learning linear separators when every vector lives on a finite set of
//! precisely representable points (atoms).
//!
//! A quantization is the triple of an atom set, a quantizer mapping any point
//! to an atom, and a restoration mapping each atom back to the point it
//! represents. [`lattices`] provides fixed-point style regular grids,
//! floating-point style logarithmic grids and arbitrary lookup tables.
//! [`learners`] runs the Perceptron and Frank-Wolfe algorithms with every
//! intermediate weight vector forced back onto the atoms, and [`analysis`]
//! measures the quantities their convergence guarantees depend on.

pub mod analysis;
pub mod data;
pub mod error;
pub mod experiment;
pub mod lattices;
pub mod learners;
pub mod scheme;
pub mod types;

pub use error::{Error, Result};
pub use scheme::{Atom, AtomCount, AtomId, Delta, QuantizationScheme};
pub use types::{DomainBox, Example, Label, LabeledDataset, Vector};
