//! Vectors, labels, datasets and the axis-aligned domain box.

use std::fmt;
use std::ops::Deref;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scheme::QuantizationScheme;

/// A finite real vector of dimension at least one.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Rejects empty input and non-finite components.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidInput("vector must have dimension >= 1".into()));
        }
        check_finite(&components)?;
        Ok(Vector(components))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// Wraps components that are already known to be finite.
    pub(crate) fn from_vec_unchecked(components: Vec<f64>) -> Self {
        debug_assert!(components.iter().all(|v| v.is_finite()));
        Vector(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Binary class label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    /// Non-negative values map to `Positive`, so a zero score predicts +1.
    pub fn from_score(score: f64) -> Self {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Negative => "-1",
            Label::Positive => "+1",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub x: Vector,
    pub y: Label,
}

impl Example {
    pub fn new(x: Vector, y: Label) -> Self {
        Example { x, y }
    }

    /// `y * x`, the example as a point of the signed hull.
    pub fn signed(&self) -> Vec<f64> {
        let s = self.y.sign();
        self.x.iter().map(|v| s * v).collect()
    }
}

/// A non-empty set of labeled examples sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    name: String,
    dim: usize,
    examples: Vec<Example>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, examples: Vec<Example>) -> Result<Self> {
        let first = examples
            .first()
            .ok_or_else(|| Error::InvalidInput("dataset must contain at least one example".into()))?;
        let dim = first.x.dim();
        for e in &examples {
            if e.x.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: e.x.dim(),
                });
            }
        }
        Ok(LabeledDataset {
            name: name.into(),
            dim,
            examples,
        })
    }

    /// Convenience constructor from raw rows and ±1 signs.
    pub fn from_rows(name: impl Into<String>, rows: &[(Vec<f64>, i8)]) -> Result<Self> {
        let examples = rows
            .iter()
            .map(|(x, y)| {
                let label = match y {
                    1 => Label::Positive,
                    -1 => Label::Negative,
                    other => return Err(Error::InvalidInput(format!("label must be +1 or -1, got {other}"))),
                };
                Ok(Example::new(Vector::new(x.clone())?, label))
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(name, examples)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Example> {
        self.examples.iter()
    }

    pub fn count_positive(&self) -> usize {
        self.examples.iter().filter(|e| e.y == Label::Positive).count()
    }

    pub fn has_both_labels(&self) -> bool {
        let p = self.count_positive();
        p > 0 && p < self.len()
    }

    /// Accuracy of always predicting the more frequent label, in percent.
    pub fn majority_baseline(&self) -> f64 {
        let p = self.count_positive();
        100.0 * p.max(self.len() - p) as f64 / self.len() as f64
    }

    pub fn max_norm(&self) -> f64 {
        self.examples.iter().map(|e| e.x.norm()).fold(0.0, f64::max)
    }

    /// Whether every example lies in the closed unit ball.
    pub fn within_unit_ball(&self) -> bool {
        self.max_norm() <= 1.0
    }

    /// `min_j y_j <x_j, w / |w|>`, or `None` when `w` is the zero vector.
    pub fn normalized_margin(&self, w: &[f64]) -> Option<f64> {
        let n = norm(w);
        if n == 0.0 {
            return None;
        }
        Some(
            self.examples
                .iter()
                .map(|e| e.y.sign() * dot(&e.x, w) / n)
                .fold(f64::INFINITY, f64::min),
        )
    }

    /// Test accuracy of the linear classifier `w` in percent; a zero score
    /// predicts +1.
    pub fn accuracy(&self, w: &[f64]) -> f64 {
        let correct = self
            .examples
            .iter()
            .filter(|e| Label::from_score(dot(&e.x, w)) == e.y)
            .count();
        100.0 * correct as f64 / self.len() as f64
    }

    /// Replace every example by the restoration of its quantization.
    pub fn quantized(&self, scheme: &dyn QuantizationScheme) -> Result<LabeledDataset> {
        let examples = self
            .examples
            .iter()
            .map(|e| Ok(Example::new(scheme.quantize(&e.x)?.into_restoration(), e.y)))
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(self.name.clone(), examples)
    }

    /// Apply `f` to every feature vector.
    pub fn map_features(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<LabeledDataset> {
        let examples = self
            .examples
            .iter()
            .map(|e| Ok(Example::new(Vector::new(f(&e.x))?, e.y)))
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(self.name.clone(), examples)
    }

    /// Seeded shuffle, then the first `train` examples form the training set.
    pub fn split(&self, train: usize, seed: u64) -> Result<(LabeledDataset, LabeledDataset)> {
        if train == 0 || train >= self.len() {
            return Err(Error::InvalidInput(format!(
                "train size {train} must be in [1, {})",
                self.len()
            )));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pick = |ids: &[usize], suffix: &str| {
            LabeledDataset::new(
                format!("{}-{suffix}", self.name),
                ids.iter().map(|&i| self.examples[i].clone()).collect(),
            )
        };
        Ok((pick(&idx[..train], "train")?, pick(&idx[train..], "test")?))
    }
}

impl<'a> IntoIterator for &'a LabeledDataset {
    type Item = &'a Example;
    type IntoIter = std::slice::Iter<'a, Example>;

    fn into_iter(self) -> Self::IntoIter {
        self.examples.iter()
    }
}

/// Closed axis-aligned box `[lo_k, hi_k]` per dimension, with `lo_k < hi_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::InvalidInput("domain must have dimension >= 1".into()));
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                actual: hi.len(),
            });
        }
        check_finite(&lo)?;
        check_finite(&hi)?;
        if let Some(k) = (0..lo.len()).find(|&k| lo[k] >= hi[k]) {
            return Err(Error::InvalidInput(format!(
                "domain interval {k} is empty: [{}, {}]",
                lo[k], hi[k]
            )));
        }
        Ok(DomainBox { lo, hi })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        DomainBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(k, &v)| self.lo[k] <= v && v <= self.hi[k])
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(k, &v)| v.clamp(self.lo[k], self.hi[k]))
            .collect()
    }

    /// Whether the origin-centered ball of `radius` fits inside the box.
    pub fn contains_ball(&self, radius: f64) -> bool {
        self.lo.iter().all(|&l| l <= -radius) && self.hi.iter().all(|&h| h >= radius)
    }

    pub fn is_origin_centered(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(&l, &h)| l == -h)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| rng.random_range(l..=h))
            .collect()
    }

    /// Corner selected by `mask`: bit `k` set picks `hi_k`, else `lo_k`.
    pub fn corner(&self, mask: u64) -> Vec<f64> {
        (0..self.dim())
            .map(|k| {
                if k < 64 && mask >> k & 1 == 1 {
                    self.hi[k]
                } else {
                    self.lo[k]
                }
            })
            .collect()
    }

    pub fn diameter(&self) -> f64 {
        distance(&self.lo, &self.hi)
    }
}
