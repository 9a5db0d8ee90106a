//! TOML experiment configuration. The grammar is documented in the README.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::data::{NormalizationMode, SyntheticSpec};
use crate::error::{Error, Result};
use crate::learners::{FrankWolfeConfig, Initialization, MistakeRule, PerceptronConfig};

pub const OUTPUT_DIR_ENV: &str = "QLEARN_OUTPUT_DIR";

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Each seed drives the learner's visiting order for one run per cell.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub normalization: NormalizationMode,
    #[serde(default)]
    pub learner: LearnerConfig,
    pub grid: GridConfig,
    /// Directory relative paths resolve against; the config file's directory
    /// when loaded from a file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
    /// Separate held-out file; otherwise the data is split.
    #[serde(default)]
    pub test_path: Option<PathBuf>,
    /// Training-set size of the seeded split.
    #[serde(default)]
    pub train: Option<usize>,
    /// Used when `train` is absent.
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default)]
    pub split_seed: u64,
}

fn default_fraction() -> f64 {
    0.8
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LearnerConfig {
    Perceptron {
        #[serde(default = "default_epochs")]
        epochs: usize,
        #[serde(default = "default_rate")]
        learning_rate: f64,
        #[serde(default)]
        mistake_rule: MistakeRule,
        #[serde(default = "default_init")]
        init: Initialization,
    },
    FrankWolfe {
        max_steps: usize,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default)]
        stop_when_gap_below: Option<f64>,
    },
}

fn default_epochs() -> usize {
    3
}
fn default_rate() -> f64 {
    1.0
}
/// Grids with an even point count have no zero atom; start from `q(0)`.
fn default_init() -> Initialization {
    Initialization::NearestToZero
}
fn default_epsilon() -> f64 {
    0.01
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig::Perceptron {
            epochs: default_epochs(),
            learning_rate: default_rate(),
            mistake_rule: MistakeRule::default(),
            init: default_init(),
        }
    }
}

impl LearnerConfig {
    pub fn perceptron(&self, seed: u64) -> Option<PerceptronConfig> {
        match self {
            LearnerConfig::Perceptron {
                epochs,
                learning_rate,
                mistake_rule,
                init,
            } => Some(PerceptronConfig {
                epochs: *epochs,
                learning_rate: *learning_rate,
                shuffle_seed: seed,
                mistake_rule: *mistake_rule,
                init: init.clone(),
            }),
            LearnerConfig::FrankWolfe { .. } => None,
        }
    }

    pub fn frank_wolfe(&self) -> Option<FrankWolfeConfig> {
        match self {
            LearnerConfig::FrankWolfe {
                max_steps,
                epsilon,
                stop_when_gap_below,
            } => Some(FrankWolfeConfig {
                max_steps: *max_steps,
                epsilon: *epsilon,
                stop_when_gap_below: *stop_when_gap_below,
            }),
            LearnerConfig::Perceptron { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match (self.perceptron(0), self.frank_wolfe()) {
            (Some(p), _) => p.validate(),
            (_, Some(f)) => f.validate(),
            _ => unreachable!(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub regular: Option<RegularGrid>,
    #[serde(default)]
    pub logarithmic: Option<LogarithmicGrid>,
    #[serde(default)]
    pub lookup: Option<LookupGrid>,
    #[serde(default)]
    pub cluster: Option<ClusterGrid>,
}

/// Rows are ranges `[lo, hi]`, columns are points per dimension.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularGrid {
    pub ranges: Vec<[f64; 2]>,
    pub points: Vec<usize>,
}

/// Rows are exponent widths, columns are total bit budgets; one bit of each
/// budget is the sign, so the mantissa gets `budget - 1 - exponent_bits`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogarithmicGrid {
    pub exponent_bits: Vec<u32>,
    pub bit_budgets: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LookupGrid {
    pub tables: Vec<PathBuf>,
    #[serde(default)]
    pub halo: f64,
    #[serde(default)]
    pub delta_samples: Option<usize>,
}

/// One column per `k`; the table is the per-class k-means centers of the
/// training set.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterGrid {
    pub k: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub delta_samples: Option<usize>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut config = Self::parse(&std::fs::read_to_string(path)?)?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return fail("name must be a non-empty file stem");
        }
        if self.seeds.is_empty() {
            return fail("seeds must not be empty");
        }
        match (&self.dataset.path, &self.dataset.synthetic) {
            (Some(_), Some(_)) => return fail("dataset takes either path or synthetic, not both"),
            (None, None) => return fail("dataset needs path or synthetic"),
            _ => {}
        }
        if !(self.dataset.train_fraction > 0.0 && self.dataset.train_fraction < 1.0) {
            return fail("train_fraction must lie in (0, 1)");
        }
        self.learner.validate()?;
        let g = &self.grid;
        let mut cells = 0;
        if let Some(r) = &g.regular {
            if r.ranges.iter().any(|[lo, hi]| !(lo < hi)) {
                return fail("every regular range needs lo < hi");
            }
            cells += r.ranges.len() * r.points.len();
        }
        if let Some(l) = &g.logarithmic {
            cells += l.exponent_bits.len() * l.bit_budgets.len();
        }
        if let Some(l) = &g.lookup {
            cells += l.tables.len();
        }
        if let Some(c) = &g.cluster {
            cells += c.k.len();
        }
        if cells == 0 {
            return fail("the scheme grid is empty");
        }
        Ok(())
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// `QLEARN_OUTPUT_DIR` if set, else `output_dir`, else the base directory.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self
                .output_dir
                .as_deref()
                .map(|p| self.resolve(p))
                .unwrap_or_else(|| self.base_dir.clone()),
        }
    }
}
