//! Frank-Wolfe over the hull of the signed examples `y_i x_i`.
//!
//! The iterate approaches the minimum-norm point of the hull, whose norm is the
//! margin and whose direction is the max-margin separator. The quantized form
//! applies `w' = q(r(q(alpha y_i r(x_i))) + r(q((1 - alpha) r(w))))`, with the
//! step `alpha` found by exact line search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{TrainedModel, TraceRecord};
use crate::scheme::{AtomId, QuantizationScheme};
use crate::types::{self, Label, LabeledDataset, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrankWolfeConfig {
    pub max_steps: usize,
    /// Target slack; a run counts as converged once its gap is this small.
    pub epsilon: f64,
    #[serde(default)]
    pub stop_when_gap_below: Option<f64>,
}

impl FrankWolfeConfig {
    pub fn new(max_steps: usize, epsilon: f64) -> Self {
        FrankWolfeConfig {
            max_steps,
            epsilon,
            stop_when_gap_below: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(Error::InvalidInput("max_steps must be >= 1".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidInput(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        Ok(())
    }
}

/// Step budget `1/sqrt(gamma delta) * ln(1/eps) + 1/(eps gamma)` with unit
/// constants. With `delta = 0` the first term is replaced by the
/// full-precision rate `ln(1/eps) / (eps gamma)`.
pub fn suggested_steps(gamma: f64, delta: f64, epsilon: f64) -> usize {
    let log_term = (1.0 / epsilon).ln().max(1.0);
    let steps = if delta > 0.0 {
        log_term / (gamma * delta).sqrt() + 1.0 / (epsilon * gamma)
    } else {
        log_term / (epsilon * gamma)
    };
    steps.ceil().clamp(1.0, 1e9) as usize
}

/// Closed-form minimizer over `[0, 1]` of `|alpha a + (1 - alpha) b|^2`.
pub fn line_search(a: &[f64], b: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (ak, bk) in a.iter().zip(b) {
        let diff = bk - ak;
        num += bk * diff;
        den += diff * diff;
    }
    if den == 0.0 {
        0.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

pub fn quantized_frank_wolfe(
    scheme: &dyn QuantizationScheme,
    data: &LabeledDataset,
    config: &FrankWolfeConfig,
) -> Result<TrainedModel> {
    if data.dim() != scheme.dim() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim(),
            actual: data.dim(),
        });
    }
    run(data, config, Some(scheme))
}

pub fn full_precision_frank_wolfe(data: &LabeledDataset, config: &FrankWolfeConfig) -> Result<TrainedModel> {
    run(data, config, None)
}

/// Positive example of smallest norm, ties to the smaller index.
fn initial_example(data: &LabeledDataset) -> Result<&[f64]> {
    data.iter()
        .filter(|e| e.y == Label::Positive)
        .map(|e| (e.x.norm(), &e.x))
        .fold(None, |best: Option<(f64, &Vector)>, (n, x)| match best {
            Some((bn, _)) if bn <= n => best,
            _ => Some((n, x)),
        })
        .map(|(_, x)| x.as_slice())
        .ok_or_else(|| Error::InvalidInput("Frank-Wolfe needs at least one positive example".into()))
}

fn run(
    data: &LabeledDataset,
    config: &FrankWolfeConfig,
    scheme: Option<&dyn QuantizationScheme>,
) -> Result<TrainedModel> {
    config.validate()?;
    let signed: Vec<Vec<f64>> = data.iter().map(|e| e.signed()).collect();
    let x0 = initial_example(data)?;

    let mut quantize_calls = 0usize;
    let mut snap = |x: &[f64]| -> Result<(Vec<f64>, Option<AtomId>)> {
        match scheme {
            Some(s) => {
                quantize_calls += 1;
                let a = s.quantize(x)?;
                let id = a.id().clone();
                Ok((a.into_restoration().into_inner(), Some(id)))
            }
            None => Ok((x.to_vec(), None)),
        }
    };

    let (mut w, mut atom) = snap(x0)?;
    let threshold = config.stop_when_gap_below.unwrap_or(config.epsilon);
    let mut trace = Vec::with_capacity(config.max_steps + 1);
    let mut mistakes = 0usize;
    let mut update_error = None;
    let mut best: Option<(f64, Vec<f64>, Option<AtomId>)> = None;
    let mut best_gap = f64::INFINITY;
    let mut steps = 0usize;
    let mut stopped = false;

    for t in 0..=config.max_steps {
        let n = types::norm(&w);
        if n == 0.0 {
            return Err(Error::DegenerateWeights { step: t });
        }
        let (i, min_dot) = signed
            .iter()
            .enumerate()
            .map(|(j, s)| (j, types::dot(&w, s)))
            .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc });
        let margin = min_dot / n;
        let gap = n - margin;
        if min_dot <= 0.0 {
            mistakes += 1;
        }
        trace.push(TraceRecord {
            step: t,
            mistakes,
            weight_norm: n,
            margin_gap: Some(gap),
            update_error,
        });
        best_gap = best_gap.min(gap);
        if best.as_ref().is_none_or(|b| margin > b.0) {
            best = Some((margin, w.clone(), atom.clone()));
        }
        steps = t;
        if config.stop_when_gap_below.is_some_and(|g| gap <= g) {
            stopped = true;
            break;
        }
        if t == config.max_steps {
            break;
        }

        let a = &signed[i];
        let alpha = line_search(a, &w);
        let ideal: Vec<f64> = a
            .iter()
            .zip(&w)
            .map(|(ak, bk)| alpha * ak + (1.0 - alpha) * bk)
            .collect();
        let (next, next_atom) = if scheme.is_some() {
            let toward: Vec<f64> = a.iter().map(|v| alpha * v).collect();
            let kept: Vec<f64> = w.iter().map(|v| (1.0 - alpha) * v).collect();
            let (p, _) = snap(&toward)?;
            let (r, _) = snap(&kept)?;
            let sum: Vec<f64> = p.iter().zip(&r).map(|(x, y)| x + y).collect();
            snap(&sum)?
        } else {
            (ideal.clone(), None)
        };
        update_error = Some(types::distance(&next, &ideal));
        w = next;
        atom = next_atom;
    }

    let (_, best_w, best_atom) = best.expect("at least one iterate is evaluated");
    Ok(TrainedModel {
        weights: Vector::new(best_w)?,
        atom: best_atom,
        last_weights: Vector::new(w)?,
        trace,
        converged: stopped || best_gap <= threshold,
        mistakes,
        mistake_indices: Vec::new(),
        // the initial q(r(x)) is not an update
        quantize_calls: quantize_calls.saturating_sub(usize::from(scheme.is_some())),
        steps,
        epochs_run: 0,
        seed: 0,
    })
}
