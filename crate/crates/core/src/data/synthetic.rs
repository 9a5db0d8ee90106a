//! Seeded linearly separable datasets with a planted margin.
//!
//! Points are drawn in the unit ball, labeled by a planted unit normal `w*`
//! through the origin, and rejected when `|<w*, x>| < margin`. A support pair
//! `+margin w* + s v` (labeled +1) and `-margin w* + s v` (labeled -1) with
//! `v` orthogonal to `w*` puts `margin w*` in the hull of the signed points,
//! so the true maximum margin equals the planted one. Output coordinates are
//! the unit-ball coordinates times `max_magnitude`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{self, Example, Label, LabeledDataset, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub dim: usize,
    pub samples: usize,
    /// Planted normal; drawn from the seed when absent.
    pub normal: Option<Vec<f64>>,
    /// Margin in unit-ball coordinates.
    pub margin: f64,
    /// Scale applied to unit-ball coordinates; bounds every feature.
    pub max_magnitude: f64,
    /// Smallest allowed `|feature|` in output coordinates.
    pub min_magnitude: f64,
    pub seed: u64,
    pub positive_fraction: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            dim: 2,
            samples: 200,
            normal: None,
            margin: 0.1,
            max_magnitude: 1.0,
            min_magnitude: 0.0,
            seed: 0,
            positive_fraction: 0.5,
        }
    }
}

impl SyntheticSpec {
    /// Two real features of magnitude 0.9..6.9, 200 points (160/40 split).
    pub fn synth01_like(seed: u64) -> Self {
        SyntheticSpec {
            dim: 2,
            samples: 200,
            margin: 0.1,
            max_magnitude: 6.9,
            min_magnitude: 0.9,
            seed,
            ..Default::default()
        }
    }

    /// Two real features of magnitude 0.01..2.7, 100 points (80/20 split).
    pub fn synth02_like(seed: u64) -> Self {
        SyntheticSpec {
            dim: 2,
            samples: 100,
            margin: 0.1,
            max_magnitude: 2.7,
            min_magnitude: 0.01,
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Generation(m));
        if self.dim == 0 {
            return fail("dimension must be >= 1".into());
        }
        if self.samples < 2 {
            return fail("need at least 2 samples".into());
        }
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return fail(format!("margin must lie in (0, 1), got {}", self.margin));
        }
        if !(self.max_magnitude.is_finite() && self.max_magnitude > 0.0) {
            return fail(format!("max magnitude must be positive, got {}", self.max_magnitude));
        }
        if !(self.min_magnitude >= 0.0 && self.min_magnitude < self.max_magnitude) {
            return fail(format!(
                "min magnitude {} must lie in [0, max magnitude)",
                self.min_magnitude
            ));
        }
        if !(self.positive_fraction > 0.0 && self.positive_fraction < 1.0) {
            return fail("positive fraction must lie in (0, 1)".into());
        }
        if let Some(n) = &self.normal {
            if n.len() != self.dim || types::norm(n) == 0.0 || !n.iter().all(|v| v.is_finite()) {
                return fail("planted normal must be a finite non-zero vector of the right dimension".into());
            }
        }
        Ok(())
    }
}

/// A generated dataset together with its planted separator.
#[derive(Clone, Debug, PartialEq)]
pub struct Planted {
    pub data: LabeledDataset,
    pub normal: Vector,
    /// Margin in output coordinates, `margin * max_magnitude`.
    pub margin: f64,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<LabeledDataset> {
    Ok(generate_planted(spec)?.data)
}

pub fn generate_planted(spec: &SyntheticSpec) -> Result<Planted> {
    spec.validate()?;
    let d = spec.dim;
    let gamma = spec.margin;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw_normal = |rng: &mut ChaCha8Rng| match &spec.normal {
        Some(n) => unit(n.clone()),
        None => loop {
            let g = gaussian(rng, d);
            if types::norm(&g) > 1e-6 {
                break unit(g);
            }
        },
    };
    let mut normal = draw_normal(&mut rng);
    let min_ok = |x: &[f64]| x.iter().all(|v| v.abs() * spec.max_magnitude >= spec.min_magnitude);

    let mut examples = Vec::with_capacity(spec.samples);
    let support = 'support: {
        for attempt in 0..10_000 {
            // a random normal close to an axis may admit no pair; try another
            if attempt > 0 && attempt % 100 == 0 && spec.normal.is_none() {
                normal = draw_normal(&mut rng);
            }
            let v = if d == 1 { vec![0.0] } else { orthogonal_unit(&mut rng, &normal) };
            let s = rng.random_range(0.0..=(1.0 - gamma * gamma).sqrt());
            let pos: Vec<f64> = (0..d).map(|k| gamma * normal[k] + s * v[k]).collect();
            let neg: Vec<f64> = (0..d).map(|k| -gamma * normal[k] + s * v[k]).collect();
            if min_ok(&pos) && min_ok(&neg) && types::norm(&pos) <= 1.0 {
                break 'support Some((pos, neg));
            }
        }
        None
    };
    let (pos, neg) = support.ok_or_else(|| {
        Error::Generation("no support pair satisfies the magnitude bounds; lower min_magnitude".into())
    })?;
    examples.push((pos, Label::Positive));
    examples.push((neg, Label::Negative));

    let want_pos = ((spec.samples as f64 * spec.positive_fraction).round() as usize).clamp(1, spec.samples - 1);
    let want_neg = spec.samples - want_pos;
    let (mut n_pos, mut n_neg) = (1usize, 1usize);
    let budget = 10_000usize.saturating_mul(spec.samples).max(1_000_000);
    let mut attempts = 0usize;
    while n_pos + n_neg < spec.samples {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Generation(format!(
                "gave up after {budget} draws; margin {gamma} is too large for the magnitude bounds"
            )));
        }
        let x = in_unit_ball(&mut rng, d);
        let score = types::dot(&normal, &x);
        if score.abs() < gamma || !min_ok(&x) {
            continue;
        }
        let label = if score > 0.0 { Label::Positive } else { Label::Negative };
        match label {
            Label::Positive if n_pos < want_pos => n_pos += 1,
            Label::Negative if n_neg < want_neg => n_neg += 1,
            _ => continue,
        }
        examples.push((x, label));
    }

    // Fisher-Yates so the support pair is not always first
    for i in (1..examples.len()).rev() {
        let j = rng.random_range(0..=i);
        examples.swap(i, j);
    }
    let examples = examples
        .into_iter()
        .map(|(x, y)| {
            let margin = y.sign() * types::dot(&normal, &x);
            assert!(
                margin >= gamma * (1.0 - 1e-12),
                "generated point violates the planted margin: {margin} < {gamma}"
            );
            let scaled = x.iter().map(|v| v * spec.max_magnitude).collect();
            Ok(Example::new(Vector::new(scaled)?, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let name = format!("synthetic-d{}-n{}-s{}", d, spec.samples, spec.seed);
    Ok(Planted {
        data: LabeledDataset::new(name, examples)?,
        normal: Vector::new(normal)?,
        margin: gamma * spec.max_magnitude,
    })
}

fn gaussian(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = types::norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

fn in_unit_ball(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let g = gaussian(rng, d);
        let n = types::norm(&g);
        if n > 0.0 {
            let r: f64 = rng.random::<f64>().powf(1.0 / d as f64);
            return g.iter().map(|v| v / n * r).collect();
        }
    }
}

fn orthogonal_unit(rng: &mut impl Rng, normal: &[f64]) -> Vec<f64> {
    loop {
        let mut g = gaussian(rng, normal.len());
        let p = types::dot(&g, normal);
        g.iter_mut().zip(normal).for_each(|(x, n)| *x -= p * n);
        if types::norm(&g) > 1e-6 {
            return unit(g);
        }
    }
}
