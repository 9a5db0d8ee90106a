//! Empirical checks of the mistake bound, the lattice-equivalence result and
//! the Frank-Wolfe margin guarantee.
//!
//! Each check first verifies the hypotheses of the result it tests and
//! returns [`Error::Inapplicable`] when they fail, so a skipped check is never
//! confused with a violated one.

use crate::analysis::margin::{estimate_margin, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::learners::{
    full_precision_perceptron, quantized_frank_wolfe, quantized_perceptron, suggested_steps, FrankWolfeConfig,
    PerceptronConfig,
};
use crate::scheme::QuantizationScheme;
use crate::types::LabeledDataset;

/// Largest number of epochs a mistake-bound run is allowed.
const MAX_EPOCHS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct MistakeBoundReport {
    pub gamma: f64,
    pub delta: f64,
    /// `1 / (gamma - delta)^2`.
    pub bound: f64,
    /// Mistakes of every run, in seed order.
    pub mistakes: Vec<usize>,
    pub max_mistakes: usize,
    /// Every run ended with a clean pass over the training set.
    pub all_separated: bool,
    pub holds: bool,
}

/// Runs the quantized Perceptron once per seed in `seeds` on the quantized
/// data and checks that every run separates it with at most
/// `1/(gamma - delta)^2` mistakes.
///
/// `config` supplies the mistake rule and learning rate; its epoch budget is
/// raised so a run can always finish, and its seed is replaced.
pub fn check_mistake_bound(
    scheme: &dyn QuantizationScheme,
    data: &LabeledDataset,
    seeds: &[u64],
    config: &PerceptronConfig,
) -> Result<MistakeBoundReport> {
    let data = data.quantized(scheme)?;
    if !data.within_unit_ball() {
        return Err(Error::Inapplicable(format!(
            "examples must satisfy |r(x)| <= 1, largest is {}",
            data.max_norm()
        )));
    }
    let delta = scheme.delta().value();
    let gamma = estimate_margin(&data, DEFAULT_BUDGET)?.gamma_hat;
    if delta >= gamma {
        return Err(Error::Inapplicable(format!(
            "quantization error {delta} is not below the margin {gamma}"
        )));
    }
    let radius = 1.0 / (gamma - delta);
    if !scheme.domain().contains_ball(radius) {
        return Err(Error::Inapplicable(format!(
            "domain does not contain the ball of radius 1/(gamma - delta) = {radius}"
        )));
    }
    if scheme.zero_atom().is_none() {
        return Err(Error::Inapplicable("the Perceptron starts at zero but the scheme has no zero atom".into()));
    }
    let bound = radius * radius;
    // each pass that is not clean costs a mistake, so this many passes suffice
    let epochs = ((bound.ceil() as usize).saturating_add(2)).min(MAX_EPOCHS);

    let mut mistakes = Vec::with_capacity(seeds.len());
    let mut all_separated = true;
    for &seed in seeds {
        let cfg = PerceptronConfig {
            epochs,
            shuffle_seed: seed,
            ..config.clone()
        };
        let model = quantized_perceptron(scheme, &data, &cfg)?;
        all_separated &= model.converged && model.accuracy(&data) == 100.0;
        mistakes.push(model.mistakes);
    }
    let max_mistakes = mistakes.iter().copied().max().unwrap_or(0);
    Ok(MistakeBoundReport {
        gamma,
        delta,
        bound,
        holds: all_separated && max_mistakes as f64 <= bound,
        mistakes,
        max_mistakes,
        all_separated,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// Mistake sequences, weight norms and final weights agree bit for bit,
    /// and no quantized update moved its target.
    pub identical: bool,
    /// Every example is exactly an atom.
    pub data_representable: bool,
    pub mistakes: usize,
    /// Index into the mistake sequence of the first disagreement.
    pub first_divergence: Option<usize>,
}

/// Runs the quantized and the full-precision Perceptron on `data` as given
/// and compares the two runs bit for bit.
pub fn lattice_equivalence(
    scheme: &dyn QuantizationScheme,
    data: &LabeledDataset,
    config: &PerceptronConfig,
) -> Result<EquivalenceReport> {
    let mut data_representable = true;
    for e in data {
        data_representable &= scheme.quantize(&e.x)?.restoration() == &e.x;
    }
    let q = quantized_perceptron(scheme, data, config)?;
    let f = full_precision_perceptron(data, config)?;

    let pairs = q.trace.iter().zip(&f.trace).zip(q.mistake_indices.iter().zip(&f.mistake_indices));
    let mut first_divergence = None;
    for (k, ((tq, tf), (iq, i_f))) in pairs.enumerate() {
        let exact = tq.update_error == Some(0.0);
        if iq != i_f || tq.weight_norm.to_bits() != tf.weight_norm.to_bits() || !exact {
            first_divergence = Some(k);
            break;
        }
    }
    if first_divergence.is_none() && q.mistake_indices.len() != f.mistake_indices.len() {
        first_divergence = Some(q.mistake_indices.len().min(f.mistake_indices.len()));
    }
    let same_weights = q
        .weights
        .iter()
        .zip(f.weights.iter())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    Ok(EquivalenceReport {
        identical: first_divergence.is_none() && same_weights,
        data_representable,
        mistakes: q.mistakes,
        first_divergence,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FwMarginReport {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub steps: usize,
    /// Normalized margin of the returned weights on the quantized data.
    pub margin: f64,
    /// `gamma - sqrt(24 delta / gamma) - epsilon`.
    pub threshold: f64,
    pub holds: bool,
    /// The threshold is not positive, so the guarantee says nothing.
    pub vacuous: bool,
    /// `Some(margin > gamma - epsilon)` when `delta <= epsilon^2 gamma`.
    pub additive_margin: Option<bool>,
    /// `Some(margin > (1 - epsilon) gamma)` when `delta <= epsilon^2 gamma^3`.
    pub relative_margin: Option<bool>,
}

/// Runs quantized Frank-Wolfe for the suggested number of steps on the
/// quantized data and checks the margin guarantee and its two corollaries.
pub fn check_fw_margin(
    scheme: &dyn QuantizationScheme,
    data: &LabeledDataset,
    epsilon: f64,
) -> Result<FwMarginReport> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let data = data.quantized(scheme)?;
    let gamma = estimate_margin(&data, DEFAULT_BUDGET)?.gamma_hat;
    if gamma <= 0.0 {
        return Err(Error::InvalidInput("the quantized data is not linearly separable".into()));
    }
    let delta = scheme.delta().value();
    let steps = suggested_steps(gamma, delta, epsilon);
    let model = quantized_frank_wolfe(scheme, &data, &FrankWolfeConfig::new(steps, epsilon))?;
    let margin = model
        .normalized_margin(&data)
        .ok_or(Error::DegenerateWeights { step: model.steps })?;
    let threshold = gamma - (24.0 * delta / gamma).sqrt() - epsilon;
    Ok(FwMarginReport {
        gamma,
        delta,
        epsilon,
        steps,
        margin,
        threshold,
        holds: margin > threshold,
        vacuous: threshold <= 0.0,
        additive_margin: (delta <= epsilon * epsilon * gamma).then_some(margin > gamma - epsilon),
        relative_margin: (delta <= epsilon * epsilon * gamma.powi(3)).then_some(margin > (1.0 - epsilon) * gamma),
    })
}
