//! Feature scaling ahead of quantization.
//!
//! Every mode is a per-dimension scale with no shift: a separator through the
//! origin stays a separator through the origin, so separability survives and
//! the margin scales with the factors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::LabeledDataset;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum NormalizationMode {
    #[default]
    None,
    /// Scale each dimension so every value fits in `[lo, hi]` with the
    /// extreme value landing on the boundary.
    ScaleToBox { lo: f64, hi: f64 },
    /// Divide every example by the largest example norm.
    UnitMaxNorm,
}

/// The mode plus the factors it produced, so the same scaling can be applied
/// to held-out data and undone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub mode: NormalizationMode,
    /// `x'_k = factors[k] * x_k`.
    pub factors: Vec<f64>,
}

impl NormalizationSpec {
    pub fn identity(dim: usize) -> Self {
        NormalizationSpec {
            mode: NormalizationMode::None,
            factors: vec![1.0; dim],
        }
    }

    /// Fit factors on `data`.
    pub fn fit(data: &LabeledDataset, mode: &NormalizationMode) -> Result<Self> {
        let d = data.dim();
        let factors = match *mode {
            NormalizationMode::None => vec![1.0; d],
            NormalizationMode::UnitMaxNorm => {
                let m = data.max_norm();
                if m == 0.0 {
                    return Err(Error::InvalidInput(
                        "cannot normalize to unit norm: every example is the zero vector".into(),
                    ));
                }
                vec![1.0 / m; d]
            }
            NormalizationMode::ScaleToBox { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidInput(format!("bad normalization box [{lo}, {hi}]")));
                }
                (0..d)
                    .map(|k| {
                        let (mn, mx) = data
                            .iter()
                            .map(|e| e.x[k])
                            .fold((0.0f64, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
                        let mut s = f64::INFINITY;
                        if mx > 0.0 {
                            if hi <= 0.0 {
                                return Err(infeasible(k, lo, hi));
                            }
                            s = s.min(hi / mx);
                        }
                        if mn < 0.0 {
                            if lo >= 0.0 {
                                return Err(infeasible(k, lo, hi));
                            }
                            s = s.min(lo / mn);
                        }
                        Ok(if s.is_finite() { s } else { 1.0 })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(NormalizationSpec {
            mode: mode.clone(),
            factors,
        })
    }

    pub fn apply(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        self.check_dim(data)?;
        data.map_features(|x| x.iter().zip(&self.factors).map(|(v, s)| v * s).collect())
    }

    pub fn invert(&self, data: &LabeledDataset) -> Result<LabeledDataset> {
        self.check_dim(data)?;
        data.map_features(|x| x.iter().zip(&self.factors).map(|(v, s)| v / s).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|&s| s == 1.0)
    }

    fn check_dim(&self, data: &LabeledDataset) -> Result<()> {
        if data.dim() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                actual: data.dim(),
            });
        }
        Ok(())
    }
}

fn infeasible(k: usize, lo: f64, hi: f64) -> Error {
    Error::InvalidInput(format!(
        "dimension {k} has values of a sign that [{lo}, {hi}] cannot hold without a shift"
    ))
}

/// Fit on `data` and apply.
pub fn normalize(data: &LabeledDataset, mode: &NormalizationMode) -> Result<(LabeledDataset, NormalizationSpec)> {
    let spec = NormalizationSpec::fit(data, mode)?;
    Ok((spec.apply(data)?, spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> LabeledDataset {
        LabeledDataset::from_rows(
            "n",
            &[(vec![0.08, -3.0], 1), (vec![1868.0, 1.5], -1), (vec![12.0, 0.0], 1)],
        )
        .unwrap()
    }

    #[test]
    fn scale_to_box_hits_the_boundary() {
        let (d, s) = normalize(&data(), &NormalizationMode::ScaleToBox { lo: -1.0, hi: 1.0 }).unwrap();
        assert_eq!(d.examples()[1].x[0], 1.0);
        assert_eq!(d.examples()[0].x[1], -1.0);
        assert!(d.iter().all(|e| e.x.iter().all(|v| v.abs() <= 1.0)));
        assert_eq!(s.factors[1], 1.0 / 3.0);
    }

    #[test]
    fn unit_max_norm() {
        let (d, _) = normalize(&data(), &NormalizationMode::UnitMaxNorm).unwrap();
        assert!((d.max_norm() - 1.0).abs() < 1e-15);
        let zero = LabeledDataset::from_rows("z", &[(vec![0.0, 0.0], 1)]).unwrap();
        assert!(normalize(&zero, &NormalizationMode::UnitMaxNorm).is_err());
    }

    #[test]
    fn already_normalized_is_identity() {
        let d = LabeledDataset::from_rows("u", &[(vec![1.0, -0.5], 1), (vec![-0.25, 1.0], -1)]).unwrap();
        let s = NormalizationSpec::fit(&d, &NormalizationMode::ScaleToBox { lo: -1.0, hi: 1.0 }).unwrap();
        assert!(s.is_identity());
        let u = LabeledDataset::from_rows("u", &[(vec![0.6, 0.8], 1)]).unwrap();
        assert!(NormalizationSpec::fit(&u, &NormalizationMode::UnitMaxNorm).unwrap().is_identity());
    }

    #[test]
    fn round_trip() {
        for mode in [
            NormalizationMode::None,
            NormalizationMode::UnitMaxNorm,
            NormalizationMode::ScaleToBox { lo: -2.0, hi: 0.5 },
        ] {
            let (n, s) = normalize(&data(), &mode).unwrap();
            let back = s.invert(&n).unwrap();
            for (a, b) in back.iter().zip(data().iter()) {
                for (u, v) in a.x.iter().zip(b.x.iter()) {
                    assert!((u - v).abs() <= 1e-12 * v.abs().max(1e-300), "{mode:?}");
                }
            }
        }
    }

    #[test]
    fn one_sided_box_rejects_wrong_signs() {
        assert!(NormalizationSpec::fit(&data(), &NormalizationMode::ScaleToBox { lo: 0.0, hi: 1.0 }).is_err());
    }
}
