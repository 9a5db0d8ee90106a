//! Perceptron with quantized weights.
//!
//! On a mistake the quantized learner replaces `w` by
//! `q(r(w) + eta * y * r(x))`; this is the only quantization step, and the
//! mistake test always uses restorations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{TrainedModel, TraceRecord, VisitOrder};
use crate::scheme::{Atom, QuantizationScheme};
use crate::types::{self, LabeledDataset, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MistakeRule {
    /// `y <w, x> < 0`.
    Strict,
    /// `y <w, x> <= 0`; a zero start updates on the first example.
    #[default]
    Lenient,
}

impl MistakeRule {
    pub fn is_mistake(self, signed_score: f64) -> bool {
        match self {
            MistakeRule::Strict => signed_score < 0.0,
            MistakeRule::Lenient => signed_score <= 0.0,
        }
    }
}

/// Starting weights.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initialization {
    /// The atom restoring exactly to the origin; an error if there is none.
    #[default]
    ZeroAtom,
    /// `q(0)`, which is the zero atom whenever one exists.
    NearestToZero,
    /// `q(p)` for quantized runs, `p` itself for full precision.
    Point(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerceptronConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub shuffle_seed: u64,
    pub mistake_rule: MistakeRule,
    pub init: Initialization,
}

impl Default for PerceptronConfig {
    fn default() -> Self {
        PerceptronConfig {
            epochs: 3,
            learning_rate: 1.0,
            shuffle_seed: 0,
            mistake_rule: MistakeRule::Lenient,
            init: Initialization::ZeroAtom,
        }
    }
}

impl PerceptronConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidInput("epochs must be >= 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidInput(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.shuffle_seed = seed;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }
}

fn check_dims(expected: usize, data: &LabeledDataset) -> Result<()> {
    if data.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            actual: data.dim(),
        });
    }
    Ok(())
}

/// Runs up to `epochs` passes in seeded shuffled order and stops after the
/// first pass without a mistake.
///
/// Examples are used as given; they should already be atoms (quantize the
/// dataset first with [`LabeledDataset::quantized`]).
pub fn quantized_perceptron(
    scheme: &dyn QuantizationScheme,
    data: &LabeledDataset,
    config: &PerceptronConfig,
) -> Result<TrainedModel> {
    config.validate()?;
    check_dims(scheme.dim(), data)?;
    let mut w: Atom = match &config.init {
        Initialization::ZeroAtom => {
            let id = scheme.zero_atom().ok_or(Error::NoZeroAtom)?;
            let r = scheme.restore(&id)?;
            Atom::new(id, r)
        }
        Initialization::NearestToZero => scheme.quantize(&vec![0.0; scheme.dim()])?,
        Initialization::Point(p) => scheme.quantize(p)?,
    };

    let eta = config.learning_rate;
    let mut order = VisitOrder::new(data.len(), config.shuffle_seed);
    let mut model = empty_model(w.restoration().clone(), config.shuffle_seed);
    let mut target = vec![0.0; scheme.dim()];

    for epoch in 0..config.epochs {
        let mut clean = true;
        for &i in order.next_epoch() {
            model.steps += 1;
            let e = &data.examples()[i];
            let y = e.y.sign();
            if !config.mistake_rule.is_mistake(y * types::dot(w.restoration(), &e.x)) {
                continue;
            }
            clean = false;
            for (t, (wk, xk)) in target.iter_mut().zip(w.restoration().iter().zip(e.x.iter())) {
                *t = wk + eta * y * xk;
            }
            w = scheme.quantize(&target)?;
            model.quantize_calls += 1;
            model.mistakes += 1;
            model.mistake_indices.push(i);
            model.trace.push(TraceRecord {
                step: model.steps,
                mistakes: model.mistakes,
                weight_norm: w.restoration().norm(),
                margin_gap: None,
                update_error: Some(types::distance(w.restoration(), &target)),
            });
        }
        model.epochs_run = epoch + 1;
        if clean {
            model.converged = true;
            break;
        }
    }
    model.weights = w.restoration().clone();
    model.last_weights = model.weights.clone();
    model.atom = Some(w.id().clone());
    Ok(model)
}

/// The same loop over real-valued weights, starting from the origin (or the
/// given point).
pub fn full_precision_perceptron(data: &LabeledDataset, config: &PerceptronConfig) -> Result<TrainedModel> {
    config.validate()?;
    let d = data.dim();
    let mut w = match &config.init {
        Initialization::ZeroAtom | Initialization::NearestToZero => vec![0.0; d],
        Initialization::Point(p) => {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: p.len(),
                });
            }
            p.clone()
        }
    };
    let eta = config.learning_rate;
    let mut order = VisitOrder::new(data.len(), config.shuffle_seed);
    let mut model = empty_model(Vector::zeros(d), config.shuffle_seed);

    for epoch in 0..config.epochs {
        let mut clean = true;
        for &i in order.next_epoch() {
            model.steps += 1;
            let e = &data.examples()[i];
            let y = e.y.sign();
            if !config.mistake_rule.is_mistake(y * types::dot(&w, &e.x)) {
                continue;
            }
            clean = false;
            for (wk, xk) in w.iter_mut().zip(e.x.iter()) {
                *wk += eta * y * xk;
            }
            model.mistakes += 1;
            model.mistake_indices.push(i);
            model.trace.push(TraceRecord {
                step: model.steps,
                mistakes: model.mistakes,
                weight_norm: types::norm(&w),
                margin_gap: None,
                update_error: Some(0.0),
            });
        }
        model.epochs_run = epoch + 1;
        if clean {
            model.converged = true;
            break;
        }
    }
    model.weights = Vector::new(w)?;
    model.last_weights = model.weights.clone();
    Ok(model)
}

fn empty_model(weights: Vector, seed: u64) -> TrainedModel {
    TrainedModel {
        last_weights: weights.clone(),
        weights,
        atom: None,
        trace: Vec::new(),
        converged: false,
        mistakes: 0,
        mistake_indices: Vec::new(),
        quantize_calls: 0,
        steps: 0,
        epochs_run: 0,
        seed,
    }
}
