//! Sink atoms: weights that every single-example update snaps straight back
//! to, so the Perceptron stops learning once it lands on one.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::learners::{quantized_perceptron, Initialization, PerceptronConfig};
use crate::scheme::{enumerate_atoms, AtomId, QuantizationScheme};
use crate::types::LabeledDataset;

/// `a` is a sink iff `q(r(a) + y r(x)) = a` for every example `(x, y)`.
pub fn is_sink(scheme: &dyn QuantizationScheme, data: &LabeledDataset, atom: &AtomId) -> Result<bool> {
    let w = scheme.restore(atom)?;
    let mut target = vec![0.0; w.dim()];
    for e in data {
        let y = e.y.sign();
        for (t, (wk, xk)) in target.iter_mut().zip(w.iter().zip(e.x.iter())) {
            *t = wk + y * xk;
        }
        if scheme.quantize(&target)?.id() != atom {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SinkSearch {
    /// Test every atom when there are at most this many.
    pub enumerate_limit: u64,
    /// Otherwise test the domain corners when `d` is at most this.
    pub corner_dim_limit: usize,
    /// Seeded Perceptron runs whose final weights become candidates and whose
    /// absorption rate is reported.
    pub runs: usize,
    pub perceptron: PerceptronConfig,
}

impl Default for SinkSearch {
    fn default() -> Self {
        SinkSearch {
            enumerate_limit: 1_000_000,
            corner_dim_limit: 20,
            runs: 0,
            perceptron: PerceptronConfig {
                init: Initialization::NearestToZero,
                ..PerceptronConfig::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SinkReport {
    pub scheme: String,
    pub candidates: usize,
    /// Sorted by id.
    pub sinks: Vec<AtomId>,
    pub runs: usize,
    /// Runs whose final weights are a sink.
    pub absorbed_runs: usize,
}

impl SinkReport {
    pub fn absorbed_fraction(&self) -> Option<f64> {
        (self.runs > 0).then(|| self.absorbed_runs as f64 / self.runs as f64)
    }
}

/// Search for sinks among the candidates chosen by `search`.
///
/// With few enough atoms every atom is tested. Otherwise the candidates are
/// the domain corners (for small `d`), the final weights of the sample runs,
/// and for each final weight the corner in its sign pattern.
pub fn detect_sinks(scheme: &dyn QuantizationScheme, data: &LabeledDataset, search: &SinkSearch) -> Result<SinkReport> {
    let d = scheme.dim();
    let mut finals = Vec::with_capacity(search.runs);
    for seed in 0..search.runs as u64 {
        let cfg = search.perceptron.clone().with_seed(seed);
        let model = quantized_perceptron(scheme, data, &cfg)?;
        finals.push(model.atom.expect("quantized runs carry an atom"));
    }

    let mut candidates: BTreeSet<AtomId> = BTreeSet::new();
    if let Some(all) = enumerate_atoms(scheme, search.enumerate_limit) {
        candidates.extend(all);
    } else {
        let dom = scheme.domain();
        if d <= search.corner_dim_limit && d < 64 {
            for mask in 0..(1u64 << d) {
                candidates.insert(scheme.quantize(&dom.corner(mask))?.id().clone());
            }
        }
        for id in &finals {
            candidates.insert(id.clone());
            let w = scheme.restore(id)?;
            let corner: Vec<f64> = w
                .iter()
                .enumerate()
                .map(|(k, &v)| match v.partial_cmp(&0.0) {
                    Some(std::cmp::Ordering::Greater) => dom.hi()[k],
                    Some(std::cmp::Ordering::Less) => dom.lo()[k],
                    _ => 0.0,
                })
                .collect();
            candidates.insert(scheme.quantize(&corner)?.id().clone());
        }
    }

    let mut sinks = Vec::new();
    for id in &candidates {
        if is_sink(scheme, data, id)? {
            sinks.push(id.clone());
        }
    }
    let absorbed_runs = finals
        .iter()
        .filter(|id| sinks.binary_search(id).is_ok())
        .count();
    Ok(SinkReport {
        scheme: scheme.describe(),
        candidates: candidates.len(),
        sinks,
        runs: search.runs,
        absorbed_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattices::build_regular;

    fn tiny() -> LabeledDataset {
        LabeledDataset::from_rows("t", &[(vec![0.1, 0.05], 1), (vec![-0.08, 0.02], -1)]).unwrap()
    }

    #[test]
    fn huge_range_corner_is_a_sink() {
        let s = build_regular(2, 4, -8.0, 8.0).unwrap();
        let corner = s.quantize(&[8.0, 8.0]).unwrap().id().clone();
        assert!(is_sink(&s, &tiny(), &corner).unwrap());
        let r = detect_sinks(&s, &tiny(), &SinkSearch::default()).unwrap();
        assert!(r.sinks.contains(&corner));
        assert_eq!(r.candidates, 16);
    }

    #[test]
    fn fine_lattice_has_none() {
        let s = build_regular(2, 201, -1.0, 1.0).unwrap();
        let d = LabeledDataset::from_rows("t", &[(vec![0.5, 0.5], 1), (vec![-0.5, 0.25], -1)]).unwrap();
        assert!(detect_sinks(&s, &d, &SinkSearch::default()).unwrap().sinks.is_empty());
    }

    #[test]
    fn zero_data_makes_everything_a_sink() {
        let s = build_regular(2, 5, -1.0, 1.0).unwrap();
        let d = LabeledDataset::from_rows("z", &[(vec![0.0, 0.0], 1)]).unwrap();
        assert_eq!(detect_sinks(&s, &d, &SinkSearch::default()).unwrap().sinks.len(), 25);
    }

    #[test]
    fn sink_candidates_from_runs_on_large_schemes() {
        let s = build_regular(30, 4, -8.0, 8.0).unwrap();
        let d = LabeledDataset::from_rows("w", &[(vec![0.1; 30], 1), (vec![-0.1; 30], -1)]).unwrap();
        let search = SinkSearch {
            runs: 3,
            ..SinkSearch::default()
        };
        let r = detect_sinks(&s, &d, &search).unwrap();
        assert_eq!(r.runs, 3);
        for id in &r.sinks {
            assert!(is_sink(&s, &d, id).unwrap());
        }
    }
}
