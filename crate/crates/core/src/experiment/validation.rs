//! Built-in validation suite: the incidence scaling law, lattice equivalence,
//! the mistake bound and the Frank-Wolfe margin guarantee, each on seeded
//! synthetic instances.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    check_fw_margin, check_mistake_bound, direction_search_margin, estimate_margin, incidence_scaling,
    lattice_equivalence,
};
use crate::data::{generate_synthetic, SyntheticSpec};
use crate::error::{Error, Result};
use crate::lattices::{build_regular, RegularLattice};
use crate::learners::{Initialization, PerceptronConfig};
use crate::types::{self, LabeledDataset};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The instance violates the hypotheses; expected for injected cases.
    Inapplicable,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inapplicable => "INAPPLICABLE",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            writeln!(f, "{:<w$}  {:<12}  {:>7.2}s  {}", c.name, c.status.to_string(), c.seconds, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationOptions {
    /// Instances per randomized check.
    pub instances: usize,
    pub seed: u64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions { instances: 100, seed: 0 }
    }
}

/// Integer data labeled by a random integer normal, on an integer grid
/// `[-radius, radius]^d` with unit step.
pub fn integer_instance(seed: u64, radius: usize) -> Result<(RegularLattice, LabeledDataset)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = rng.random_range(1..=5usize);
    let n = rng.random_range(2..=500usize);
    let normal: Vec<f64> = loop {
        let v: Vec<f64> = (0..d).map(|_| f64::from(rng.random_range(-3i32..=3))).collect();
        if v.iter().any(|&c| c != 0.0) {
            break v;
        }
    };
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let x: Vec<f64> = (0..d).map(|_| f64::from(rng.random_range(-4i32..=4))).collect();
        let s = types::dot(&normal, &x);
        if s != 0.0 {
            rows.push((x, if s > 0.0 { 1 } else { -1 }));
        }
    }
    let lattice = build_regular(d, 2 * radius + 1, -(radius as f64), radius as f64)?;
    Ok((lattice, LabeledDataset::from_rows(format!("integer-{seed}"), &rows)?))
}

/// Planted-margin data in the unit ball, parameters drawn from `seed`.
pub fn planted_instance(seed: u64) -> Result<(LabeledDataset, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = SyntheticSpec {
        dim: [2, 3, 5][rng.random_range(0..3)],
        samples: rng.random_range(40..=200),
        margin: rng.random_range(0.15..0.35),
        seed,
        ..SyntheticSpec::default()
    };
    Ok((generate_synthetic(&spec)?, spec.margin))
}

/// Odd-sized symmetric regular lattice with error parameter at most `delta`
/// whose range reaches at least `radius`.
pub fn lattice_for(dim: usize, delta: f64, radius: f64) -> Result<RegularLattice> {
    let step = 2.0 * delta / (dim as f64).sqrt();
    let half = (radius / step).ceil() as usize + 1;
    let hi = half as f64 * step;
    build_regular(dim, 2 * half + 1, -hi, hi)
}

fn timed(name: &str, f: impl FnOnce() -> (CheckStatus, String)) -> CheckResult {
    let start = Instant::now();
    let (status, detail) = f();
    CheckResult {
        name: name.into(),
        status,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn error_status(e: Error) -> (CheckStatus, String) {
    match e {
        Error::Inapplicable(m) => (CheckStatus::Inapplicable, m),
        other => (CheckStatus::Fail, other.to_string()),
    }
}

pub fn check_incidence(dim: usize, range: (f64, f64), seed: u64) -> CheckResult {
    timed(&format!("incidence-slope-d{dim}"), || {
        match incidence_scaling(dim, &[8, 16, 32, 64], 32, seed) {
            Ok(r) => {
                let ok = r.slope >= range.0 && r.slope <= range.1;
                (
                    if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                    format!(
                        "slope {:.4} (want [{}, {}], theory {:.4})",
                        r.slope,
                        range.0,
                        range.1,
                        1.0 - 1.0 / dim as f64
                    ),
                )
            }
            Err(e) => error_status(e),
        }
    })
}

pub fn check_equivalence(options: &ValidationOptions) -> CheckResult {
    timed("lattice-equivalence", || {
        let config = PerceptronConfig::default().with_epochs(10);
        let mut bad = Vec::new();
        for i in 0..options.instances {
            let seed = options.seed.wrapping_add(i as u64);
            let run = || -> Result<bool> {
                let (lattice, data) = integer_instance(seed, 4096)?;
                let cfg = config.clone().with_seed(seed);
                let r = lattice_equivalence(&lattice, &data, &cfg)?;
                Ok(r.identical && r.data_representable)
            };
            match run() {
                Ok(true) => {}
                Ok(false) => bad.push(format!("seed {seed}: traces differ")),
                Err(e) => bad.push(format!("seed {seed}: {e}")),
            }
        }
        if bad.is_empty() {
            (CheckStatus::Pass, format!("{} instances bitwise identical", options.instances))
        } else {
            (CheckStatus::Fail, bad.join("; "))
        }
    })
}

/// A grid whose step is off by one point must break the equivalence.
pub fn check_equivalence_mutation(options: &ValidationOptions) -> CheckResult {
    timed("lattice-equivalence-mutant", || {
        let run = || -> Result<bool> {
            let (good, data) = integer_instance(options.seed, 16)?;
            let d = data.dim();
            let mutant = build_regular(d, good.points_per_dim() + 1, good.lo(), good.hi())?;
            let cfg = PerceptronConfig {
                init: Initialization::NearestToZero,
                ..PerceptronConfig::default().with_epochs(10)
            };
            Ok(!lattice_equivalence(&mutant, &data, &cfg)?.identical)
        };
        match run() {
            Ok(true) => (CheckStatus::Pass, "off-by-one step detected".into()),
            Ok(false) => (CheckStatus::Fail, "mutant lattice reproduced the exact trace".into()),
            Err(e) => error_status(e),
        }
    })
}

pub fn check_mistake_bounds(options: &ValidationOptions) -> CheckResult {
    timed("mistake-bound", || {
        let mut bad = Vec::new();
        let mut worst = 0.0f64;
        let mut tested = 0;
        for i in 0..options.instances {
            let seed = options.seed.wrapping_add(1000 + i as u64);
            let run = || -> Result<(bool, f64)> {
                let (data, gamma) = planted_instance(seed)?;
                // delta between a tenth and 0.4 of the planted margin
                let frac = 0.1 + 0.3 * (i % 4) as f64 / 3.0;
                let delta = frac * gamma;
                // shrink so that quantized examples stay in the unit ball
                let data = data.map_features(|x| x.iter().map(|v| v * (1.0 - delta)).collect())?;
                let radius = 1.0 / ((1.0 - delta) * gamma - 2.0 * delta) + 1.0;
                let lattice = lattice_for(data.dim(), delta, radius)?;
                let r = check_mistake_bound(&lattice, &data, &[seed, seed + 1], &PerceptronConfig::default())?;
                Ok((r.holds, r.max_mistakes as f64 / r.bound))
            };
            match run() {
                Ok((ok, ratio)) => {
                    tested += 1;
                    worst = worst.max(ratio);
                    if !ok {
                        bad.push(format!("seed {seed}"));
                    }
                }
                Err(Error::Inapplicable(_)) => {}
                Err(e) => bad.push(format!("seed {seed}: {e}")),
            }
        }
        if bad.is_empty() && tested > 0 {
            (
                CheckStatus::Pass,
                format!("{tested} instances, worst mistakes/bound {worst:.4}"),
            )
        } else if bad.is_empty() {
            (CheckStatus::Fail, "no instance satisfied the hypotheses".into())
        } else {
            (CheckStatus::Fail, bad.join("; "))
        }
    })
}

/// A lattice coarser than the margin must be reported as inapplicable.
pub fn check_injected_inapplicable(options: &ValidationOptions) -> CheckResult {
    timed("mistake-bound-injected", || {
        let run = || -> Result<()> {
            let (data, gamma) = planted_instance(options.seed)?;
            let lattice = lattice_for(data.dim(), 2.0 * gamma, 20.0)?;
            check_mistake_bound(&lattice, &data, &[0], &PerceptronConfig::default()).map(|_| ())
        };
        match run() {
            Err(Error::Inapplicable(m)) => (CheckStatus::Inapplicable, m),
            Err(e) => (CheckStatus::Fail, e.to_string()),
            Ok(()) => (CheckStatus::Fail, "delta >= gamma was not rejected".into()),
        }
    })
}

pub fn check_fw_margins(options: &ValidationOptions, epsilon: f64) -> CheckResult {
    timed("frank-wolfe-margin", || {
        let mut bad = Vec::new();
        let mut slack = f64::INFINITY;
        let count = options.instances.min(40).max(1);
        for i in 0..count {
            let seed = options.seed.wrapping_add(2000 + i as u64);
            let run = || -> Result<(bool, f64)> {
                let (data, gamma) = planted_instance(seed)?;
                let lattice = lattice_for(data.dim(), 0.5 * epsilon * epsilon * gamma, 1.0)?;
                let r = check_fw_margin(&lattice, &data, epsilon)?;
                let c1 = r.additive_margin.ok_or_else(|| {
                    Error::Inapplicable(format!("delta {} above eps^2 gamma", r.delta))
                })?;
                Ok((r.holds && c1, r.margin - (r.gamma - epsilon)))
            };
            match run() {
                Ok((ok, s)) => {
                    slack = slack.min(s);
                    if !ok {
                        bad.push(format!("seed {seed}"));
                    }
                }
                Err(e) => bad.push(format!("seed {seed}: {e}")),
            }
        }
        if bad.is_empty() {
            (CheckStatus::Pass, format!("{count} instances, least slack {slack:.4}"))
        } else {
            (CheckStatus::Fail, bad.join("; "))
        }
    })
}

/// Frank-Wolfe margin estimates agree with a random direction search.
pub fn check_margin_oracle(options: &ValidationOptions) -> CheckResult {
    timed("margin-oracle", || {
        let mut worst = 0.0f64;
        let count = options.instances.min(10).max(1);
        for i in 0..count {
            let seed = options.seed.wrapping_add(3000 + i as u64);
            let spec = SyntheticSpec {
                dim: 2 + (i % 2),
                samples: 100,
                margin: 0.2,
                seed,
                ..SyntheticSpec::default()
            };
            let run = || -> Result<f64> {
                let data = generate_synthetic(&spec)?;
                let fw = estimate_margin(&data, 20_000)?;
                let ds = direction_search_margin(&data, 100_000, seed)?;
                Ok((fw.gamma_hat - ds.gamma_hat).abs())
            };
            match run() {
                Ok(diff) => worst = worst.max(diff),
                Err(e) => return (CheckStatus::Fail, format!("seed {seed}: {e}")),
            }
        }
        let status = if worst <= 1e-3 { CheckStatus::Pass } else { CheckStatus::Fail };
        (status, format!("{count} instances, largest disagreement {worst:.2e}"))
    })
}

pub fn run_validation_suite(options: &ValidationOptions) -> ValidationReport {
    ValidationReport {
        checks: vec![
            check_incidence(2, (0.4, 0.6), options.seed),
            check_incidence(3, (0.57, 0.77), options.seed),
            check_equivalence(options),
            check_equivalence_mutation(options),
            check_mistake_bounds(options),
            check_injected_inapplicable(options),
            check_fw_margins(options, 0.1),
            check_margin_oracle(options),
        ],
    }
}
