//! Sweep a scheme grid: one training run per (cell, seed).

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::analysis::is_sink;
use crate::data::{build_cluster_lattice, generate_synthetic, load_dataset, NormalizationSpec};
use crate::error::{Error, Result};
use crate::experiment::config::ExperimentConfig;
use crate::lattices::{build_logarithmic, build_regular, LookupLattice};
use crate::learners::{quantized_frank_wolfe, quantized_perceptron};
use crate::scheme::QuantizationScheme;
use crate::types::LabeledDataset;

/// Result of one training run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub test_accuracy: f64,
    pub train_accuracy: f64,
    pub mistakes: usize,
    pub converged: bool,
    /// The final weights are a sink atom for the training set.
    pub sink: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CellOutcome {
    Done {
        scheme: String,
        delta: f64,
        delta_exact: bool,
        runs: Vec<RunResult>,
    },
    /// The cell's parameters do not describe a scheme (e.g. a bit budget too
    /// small for the exponent width).
    NotApplicable,
    Failed(String),
}

impl CellOutcome {
    pub fn mean_accuracy(&self) -> Option<f64> {
        match self {
            CellOutcome::Done { runs, .. } if !runs.is_empty() => {
                Some(runs.iter().map(|r| r.test_accuracy).sum::<f64>() / runs.len() as f64)
            }
            _ => None,
        }
    }
}

/// Accuracy table for one scheme family.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentGrid {
    pub family: String,
    pub row_label: String,
    pub column_label: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    /// `cells[row][column]`.
    pub cells: Vec<Vec<CellOutcome>>,
}

impl ExperimentGrid {
    pub fn cell(&self, row: &str, column: &str) -> Option<&CellOutcome> {
        let r = self.rows.iter().position(|x| x == row)?;
        let c = self.columns.iter().position(|x| x == column)?;
        Some(&self.cells[r][c])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub name: String,
    pub dataset: String,
    pub train_size: usize,
    pub test_size: usize,
    /// Test-set accuracy of always predicting the training majority.
    pub majority_baseline: f64,
    pub grids: Vec<ExperimentGrid>,
}

/// What to build for one cell.
#[derive(Clone, Debug)]
enum CellSpec {
    Regular { lo: f64, hi: f64, points: usize },
    Logarithmic { exponent_bits: u32, mantissa_bits: Option<u32> },
    Lookup { table: PathBuf, halo: f64, samples: Option<usize> },
    Cluster { k: usize, seed: u64, samples: Option<usize> },
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn layout(config: &ExperimentConfig) -> Vec<(ExperimentGrid, Vec<Vec<CellSpec>>)> {
    let mut out = Vec::new();
    let g = &config.grid;
    if let Some(r) = &g.regular {
        out.push((
            ExperimentGrid {
                family: "regular".into(),
                row_label: "range".into(),
                column_label: "points/dim".into(),
                rows: r.ranges.iter().map(|[lo, hi]| format!("[{},{}]", fmt_num(*lo), fmt_num(*hi))).collect(),
                columns: r.points.iter().map(|p| p.to_string()).collect(),
                cells: Vec::new(),
            },
            r.ranges
                .iter()
                .map(|&[lo, hi]| r.points.iter().map(|&points| CellSpec::Regular { lo, hi, points }).collect())
                .collect(),
        ));
    }
    if let Some(l) = &g.logarithmic {
        out.push((
            ExperimentGrid {
                family: "logarithmic".into(),
                row_label: "exponent bits".into(),
                column_label: "bit budget".into(),
                rows: l.exponent_bits.iter().map(|e| e.to_string()).collect(),
                columns: l.bit_budgets.iter().map(|b| b.to_string()).collect(),
                cells: Vec::new(),
            },
            l.exponent_bits
                .iter()
                .map(|&e| {
                    l.bit_budgets
                        .iter()
                        .map(|&b| CellSpec::Logarithmic {
                            exponent_bits: e,
                            mantissa_bits: b.checked_sub(1 + e),
                        })
                        .collect()
                })
                .collect(),
        ));
    }
    if let Some(l) = &g.lookup {
        out.push((
            ExperimentGrid {
                family: "lookup".into(),
                row_label: "".into(),
                column_label: "table".into(),
                rows: vec!["lookup".into()],
                columns: l.tables.iter().map(|t| t.display().to_string()).collect(),
                cells: Vec::new(),
            },
            vec![l
                .tables
                .iter()
                .map(|t| CellSpec::Lookup {
                    table: config.resolve(t),
                    halo: l.halo,
                    samples: l.delta_samples,
                })
                .collect()],
        ));
    }
    if let Some(c) = &g.cluster {
        out.push((
            ExperimentGrid {
                family: "cluster".into(),
                row_label: "".into(),
                column_label: "k per class".into(),
                rows: vec!["cluster".into()],
                columns: c.k.iter().map(|k| k.to_string()).collect(),
                cells: Vec::new(),
            },
            vec![c
                .k
                .iter()
                .map(|&k| CellSpec::Cluster {
                    k,
                    seed: c.seed,
                    samples: c.delta_samples,
                })
                .collect()],
        ));
    }
    out
}

fn build_scheme(spec: &CellSpec, train: &LabeledDataset) -> Result<Option<Box<dyn QuantizationScheme>>> {
    let d = train.dim();
    Ok(Some(match spec {
        CellSpec::Regular { lo, hi, points } => Box::new(build_regular(d, *points, *lo, *hi)?),
        CellSpec::Logarithmic {
            exponent_bits,
            mantissa_bits,
        } => match mantissa_bits {
            Some(t) => Box::new(build_logarithmic(d, *exponent_bits, *t)?),
            None => return Ok(None),
        },
        CellSpec::Lookup { table, halo, samples } => {
            let rows = crate::data::csv::read_table(table)?;
            let mut l = LookupLattice::new(rows, *halo)?;
            if let Some(s) = samples {
                l = l.with_delta_samples(*s);
            }
            Box::new(l)
        }
        CellSpec::Cluster { k, seed, samples } => {
            let mut l = build_cluster_lattice(train, *k, *seed)?;
            if let Some(s) = samples {
                l = l.with_delta_samples(*s);
            }
            Box::new(l)
        }
    }))
}

fn run_cell(config: &ExperimentConfig, spec: &CellSpec, train: &LabeledDataset, test: &LabeledDataset) -> CellOutcome {
    let attempt = || -> Result<CellOutcome> {
        let Some(scheme) = build_scheme(spec, train)? else {
            return Ok(CellOutcome::NotApplicable);
        };
        let qtrain = train.quantized(scheme.as_ref())?;
        let qtest = test.quantized(scheme.as_ref())?;
        let delta = scheme.delta();
        let mut runs = Vec::with_capacity(config.seeds.len());
        for &seed in &config.seeds {
            let model = match (config.learner.perceptron(seed), config.learner.frank_wolfe()) {
                (Some(p), _) => quantized_perceptron(scheme.as_ref(), &qtrain, &p)?,
                (_, Some(f)) => quantized_frank_wolfe(scheme.as_ref(), &qtrain, &f)?,
                _ => unreachable!(),
            };
            let atom = model.atom.clone().expect("quantized runs carry an atom");
            runs.push(RunResult {
                seed,
                test_accuracy: model.accuracy(&qtest),
                train_accuracy: model.accuracy(&qtrain),
                mistakes: model.mistakes,
                converged: model.converged,
                sink: is_sink(scheme.as_ref(), &qtrain, &atom)?,
            });
        }
        Ok(CellOutcome::Done {
            scheme: scheme.describe(),
            delta: delta.value(),
            delta_exact: delta.is_exact(),
            runs,
        })
    };
    attempt().unwrap_or_else(|e| CellOutcome::Failed(e.to_string()))
}

/// Load (or generate), split and normalize the data named by `config`.
pub fn prepare_data(config: &ExperimentConfig) -> Result<(LabeledDataset, LabeledDataset)> {
    let ds = &config.dataset;
    let full = match (&ds.path, &ds.synthetic) {
        (Some(p), _) => load_dataset(config.resolve(p))?,
        (_, Some(s)) => generate_synthetic(s)?,
        _ => return Err(Error::Config("dataset needs path or synthetic".into())),
    };
    let (train, test) = match &ds.test_path {
        Some(t) => (full, load_dataset(config.resolve(t))?),
        None => {
            let n = ds
                .train
                .unwrap_or_else(|| ((full.len() as f64) * ds.train_fraction).round() as usize);
            full.split(n, ds.split_seed)?
        }
    };
    if train.dim() != test.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            actual: test.dim(),
        });
    }
    let norm = NormalizationSpec::fit(&train, &config.normalization)?;
    Ok((norm.apply(&train)?, norm.apply(&test)?))
}

/// Run every cell of the grid. Cells run in parallel; results are collected
/// in grid order, so the output does not depend on scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let (train, test) = prepare_data(config)?;
    let mut grids = Vec::new();
    for (mut grid, specs) in layout(config) {
        let flat: Vec<&CellSpec> = specs.iter().flatten().collect();
        let mut results: Vec<CellOutcome> = flat
            .par_iter()
            .map(|spec| run_cell(config, spec, &train, &test))
            .collect::<Vec<_>>();
        let width = grid.columns.len();
        for _ in 0..grid.rows.len() {
            let rest = results.split_off(width);
            grid.cells.push(std::mem::replace(&mut results, rest));
        }
        grids.push(grid);
    }
    let positives = train.count_positive();
    let majority_positive = 2 * positives >= train.len();
    let test_hits = test
        .iter()
        .filter(|e| (e.y.sign() > 0.0) == majority_positive)
        .count();
    Ok(ExperimentOutput {
        name: config.name.clone(),
        dataset: train.name().trim_end_matches("-train").to_string(),
        train_size: train.len(),
        test_size: test.len(),
        majority_baseline: 100.0 * test_hits as f64 / test.len() as f64,
        grids,
    })
}

impl ExperimentOutput {
    /// One line per (cell, seed).
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "family",
            "row",
            "column",
            "scheme",
            "seed",
            "test_accuracy",
            "train_accuracy",
            "mistakes",
            "converged",
            "delta",
            "delta_exact",
            "sink",
            "status",
        ])?;
        for g in &self.grids {
            for (r, row) in g.cells.iter().enumerate() {
                for (c, cell) in row.iter().enumerate() {
                    let key = [g.family.clone(), g.rows[r].clone(), g.columns[c].clone()];
                    match cell {
                        CellOutcome::Done {
                            scheme,
                            delta,
                            delta_exact,
                            runs,
                        } => {
                            for run in runs {
                                let mut rec = key.to_vec();
                                rec.extend([
                                    scheme.clone(),
                                    run.seed.to_string(),
                                    fmt_num(run.test_accuracy),
                                    fmt_num(run.train_accuracy),
                                    run.mistakes.to_string(),
                                    run.converged.to_string(),
                                    fmt_num(*delta),
                                    delta_exact.to_string(),
                                    run.sink.to_string(),
                                    "ok".into(),
                                ]);
                                w.write_record(&rec)?;
                            }
                        }
                        CellOutcome::NotApplicable | CellOutcome::Failed(_) => {
                            let status = match cell {
                                CellOutcome::Failed(m) => format!("error: {m}"),
                                _ => "n/a".into(),
                            };
                            let mut rec = key.to_vec();
                            rec.extend(std::iter::repeat_n(String::new(), 9));
                            rec.push(status);
                            w.write_record(&rec)?;
                        }
                    }
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Aligned text tables of mean test accuracy. `--` marks cells with no
    /// scheme, `ERR` failed cells and `*` cells where some run ended on a sink.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}: {} ({} train / {} test, majority baseline {:.1}%)",
            self.name, self.dataset, self.train_size, self.test_size, self.majority_baseline
        );
        for g in &self.grids {
            let _ = writeln!(out);
            let corner = if g.row_label.is_empty() {
                g.column_label.clone()
            } else {
                format!("{} \\ {}", g.row_label, g.column_label)
            };
            let cells: Vec<Vec<String>> = g
                .cells
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| match c {
                            CellOutcome::Done { runs, .. } => {
                                let star = if runs.iter().any(|r| r.sink) { "*" } else { "" };
                                format!("{:.1}{star}", c.mean_accuracy().unwrap_or(0.0))
                            }
                            CellOutcome::NotApplicable => "--".into(),
                            CellOutcome::Failed(_) => "ERR".into(),
                        })
                        .collect()
                })
                .collect();
            let first = g.rows.iter().map(String::len).chain([corner.len()]).max().unwrap_or(0);
            let widths: Vec<usize> = (0..g.columns.len())
                .map(|c| cells.iter().map(|r| r[c].len()).chain([g.columns[c].len()]).max().unwrap_or(0))
                .collect();
            let _ = write!(out, "{}: {corner:<first$}", g.family);
            for (c, w) in widths.iter().enumerate() {
                let _ = write!(out, "  {:>w$}", g.columns[c]);
            }
            let _ = writeln!(out);
            let pad = g.family.len() + 2;
            for (r, row) in cells.iter().enumerate() {
                let _ = write!(out, "{:pad$}{:<first$}", "", g.rows[r]);
                for (v, w) in row.iter().zip(&widths) {
                    let _ = write!(out, "  {v:>w$}");
                }
                let _ = writeln!(out);
            }
            for (r, row) in g.cells.iter().enumerate() {
                for (c, cell) in row.iter().enumerate() {
                    if let CellOutcome::Failed(m) = cell {
                        let _ = writeln!(out, "  error at {} / {}: {m}", g.rows[r], g.columns[c]);
                    }
                }
            }
        }
        out
    }

    /// Write `<name>.csv` and `<name>.txt` into `dir`; returns their paths.
    pub fn write(&self, dir: &std::path::Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.name));
        let txt_path = dir.join(format!("{}.txt", self.name));
        fs::write(&csv_path, self.to_csv()?)?;
        fs::write(&txt_path, self.to_text())?;
        Ok((csv_path, txt_path))
    }
}
