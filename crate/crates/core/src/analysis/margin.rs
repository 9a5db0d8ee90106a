//! Measuring the margin of a labeled set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::learners::{full_precision_frank_wolfe, FrankWolfeConfig};
use crate::types::{self, LabeledDataset, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginMethod {
    FrankWolfe,
    DirectionSearch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginEstimate {
    /// Best observed `min_j y_j <x_j, w/|w|>`; a lower bound on the margin.
    pub gamma_hat: f64,
    /// Unit direction achieving `gamma_hat` (zero when none was found).
    pub direction: Vector,
    pub method: MarginMethod,
    pub steps: usize,
}

impl MarginEstimate {
    pub fn separable(&self) -> bool {
        self.gamma_hat > 0.0
    }
}

pub const DEFAULT_BUDGET: usize = 20_000;

fn require_both_labels(data: &LabeledDataset) -> Result<()> {
    if !data.has_both_labels() {
        return Err(Error::InvalidInput("margin needs examples of both labels".into()));
    }
    Ok(())
}

/// Full-precision Frank-Wolfe on the hull of the signed examples; the
/// returned iterate's normalized margin is the estimate. A hull containing
/// the origin shows up as a zero iterate and is reported as `gamma_hat = 0`.
pub fn estimate_margin(data: &LabeledDataset, budget: usize) -> Result<MarginEstimate> {
    require_both_labels(data)?;
    let config = FrankWolfeConfig {
        max_steps: budget.max(1),
        epsilon: 1e-12,
        stop_when_gap_below: Some(1e-12),
    };
    let d = data.dim();
    match full_precision_frank_wolfe(data, &config) {
        Ok(model) => {
            let n = model.weights.norm();
            let direction = Vector::new(model.weights.iter().map(|v| v / n).collect())?;
            let gamma_hat = data
                .normalized_margin(&model.weights)
                .expect("Frank-Wolfe never returns zero weights");
            Ok(MarginEstimate {
                gamma_hat,
                direction,
                method: MarginMethod::FrankWolfe,
                steps: model.steps,
            })
        }
        Err(Error::DegenerateWeights { step }) => Ok(MarginEstimate {
            gamma_hat: 0.0,
            direction: Vector::zeros(d),
            method: MarginMethod::FrankWolfe,
            steps: step,
        }),
        Err(e) => Err(e),
    }
}

fn min_margin(signed: &[Vec<f64>], u: &[f64]) -> f64 {
    signed
        .iter()
        .map(|s| types::dot(s, u))
        .fold(f64::INFINITY, f64::min)
}

fn unit(v: &mut [f64]) -> bool {
    let n = types::norm(v);
    if n == 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Best `min_j y_j <x_j, u>` over `samples` seeded random unit directions,
/// followed by a shrinking-radius local search around the best one. An
/// independent check on [`estimate_margin`] for small dimensions.
pub fn direction_search_margin(data: &LabeledDataset, samples: usize, seed: u64) -> Result<MarginEstimate> {
    require_both_labels(data)?;
    let d = data.dim();
    let signed: Vec<Vec<f64>> = data.iter().map(|e| e.signed()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        if unit(&mut v) {
            break v;
        }
    };
    let mut best = draw(&mut rng);
    let mut best_val = min_margin(&signed, &best);
    for _ in 1..samples.max(1) {
        let u = draw(&mut rng);
        let v = min_margin(&signed, &u);
        if v > best_val {
            best = u;
            best_val = v;
        }
    }
    let mut radius = 0.1;
    let mut steps = samples;
    while radius > 1e-10 {
        let mut improved = false;
        for _ in 0..64 {
            steps += 1;
            let mut cand: Vec<f64> = best
                .iter()
                .map(|b| b + radius * rng.sample::<f64, _>(StandardNormal))
                .collect();
            if !unit(&mut cand) {
                continue;
            }
            let v = min_margin(&signed, &cand);
            if v > best_val {
                best = cand;
                best_val = v;
                improved = true;
            }
        }
        if !improved {
            radius *= 0.5;
        }
    }
    Ok(MarginEstimate {
        gamma_hat: best_val.max(0.0),
        direction: Vector::new(best)?,
        method: MarginMethod::DirectionSearch,
        steps,
    })
}
