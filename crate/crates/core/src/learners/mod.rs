//! Perceptron and Frank-Wolfe, each in a quantized form that forces every
//! weight vector back onto the atoms and a full-precision baseline.

pub mod frank_wolfe;
pub mod perceptron;

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use frank_wolfe::{
    full_precision_frank_wolfe, quantized_frank_wolfe, suggested_steps, FrankWolfeConfig,
};
pub use perceptron::{
    full_precision_perceptron, quantized_perceptron, Initialization, MistakeRule, PerceptronConfig,
};

use crate::error::Result;
use crate::scheme::AtomId;
use crate::types::{LabeledDataset, Vector};

/// One step of a training run.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    /// Cumulative mistakes up to and including this step.
    pub mistakes: usize,
    /// `|r(w_t)|` after this step.
    pub weight_norm: f64,
    /// Frank-Wolfe margin gap `|r(w_t)| - min_j y_j <r(x_j), r(w_t)/|r(w_t)|>`.
    pub margin_gap: Option<f64>,
    /// Distance between the stored weights and the exact real-valued update
    /// that produced them.
    pub update_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    /// Returned weights: `r(w)` for quantized runs.
    pub weights: Vector,
    /// Atom of the returned weights, for quantized runs.
    pub atom: Option<AtomId>,
    /// Weights after the last step; differs from `weights` only when
    /// Frank-Wolfe returns an earlier, better iterate.
    pub last_weights: Vector,
    pub trace: Vec<TraceRecord>,
    pub converged: bool,
    pub mistakes: usize,
    /// Example index of every mistake, in order.
    pub mistake_indices: Vec<usize>,
    /// Number of quantizer invocations made by weight updates.
    pub quantize_calls: usize,
    /// Examples visited (Perceptron) or iterations taken (Frank-Wolfe).
    pub steps: usize,
    pub epochs_run: usize,
    pub seed: u64,
}

impl TrainedModel {
    pub fn accuracy(&self, data: &LabeledDataset) -> f64 {
        data.accuracy(&self.weights)
    }

    pub fn normalized_margin(&self, data: &LabeledDataset) -> Option<f64> {
        data.normalized_margin(&self.weights)
    }

    /// `step,mistakes,norm,margin_gap`, one row per trace record; the margin
    /// gap column is empty for Perceptron runs.
    pub fn write_trace_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "mistakes", "norm", "margin_gap"])?;
        for r in &self.trace {
            w.write_record([
                r.step.to_string(),
                r.mistakes.to_string(),
                r.weight_norm.to_string(),
                r.margin_gap.map(|g| g.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Seeded per-epoch permutation of example indices.
pub(crate) struct VisitOrder {
    rng: ChaCha8Rng,
    order: Vec<usize>,
}

impl VisitOrder {
    pub(crate) fn new(n: usize, seed: u64) -> Self {
        VisitOrder {
            rng: ChaCha8Rng::seed_from_u64(seed),
            order: (0..n).collect(),
        }
    }

    pub(crate) fn next_epoch(&mut self) -> &[usize] {
        self.order.shuffle(&mut self.rng);
        &self.order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visit_order_is_seeded_permutation() {
        let mut a = VisitOrder::new(20, 9);
        let mut b = VisitOrder::new(20, 9);
        for _ in 0..3 {
            let ea = a.next_epoch().to_vec();
            assert_eq!(ea, b.next_epoch());
            let mut s = ea.clone();
            s.sort();
            assert_eq!(s, (0..20).collect::<Vec<_>>());
        }
    }
}
