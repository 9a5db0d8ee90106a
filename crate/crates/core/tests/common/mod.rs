//! Property predicates shared by the property tests and the acceptance
//! harness, plus the Table-2 style bifurcation check.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::io::Cursor;

use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngSeed, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlearn::analysis::{count_separator_incidence, detect_sinks, estimate_margin, SinkSearch};
use qlearn::data::{
    generate_planted, kmeans, normalize, parse_dense_csv, parse_sparse, serialize_sparse, write_dense_csv,
    NormalizationMode, SparseOptions, SyntheticSpec,
};
use qlearn::lattices::{build_logarithmic, build_lookup, build_regular, LogarithmicLattice, SchemeSpec};
use qlearn::learners::{
    quantized_frank_wolfe, quantized_perceptron, FrankWolfeConfig, Initialization, PerceptronConfig,
};
use qlearn::scheme::enumerate_atoms;
use qlearn::types::distance;
use qlearn::{LabeledDataset, QuantizationScheme, Vector};

pub type Check = std::result::Result<(), String>;

/// Deterministic runner: fixed seed, no persisted regressions.
pub fn runner(cases: u32, seed: u64) -> TestRunner {
    TestRunner::new(Config {
        cases,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: Some(Box::new(FileFailurePersistence::Off)),
        ..Config::default()
    })
}

fn run<S: Strategy>(
    cases: u32,
    seed: u64,
    strategy: S,
    test: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>,
) -> Check {
    runner(cases, seed).run(&strategy, test).map_err(|e| e.to_string())
}

fn lib<T>(r: qlearn::Result<T>) -> std::result::Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

/// Parameters of a small scheme; built on demand so the strategy stays `Debug + Clone`.
#[derive(Clone, Debug)]
pub enum SmallScheme {
    Regular { dim: usize, points: usize, lo: f64, hi: f64 },
    Logarithmic { dim: usize, e: u32, t: u32 },
    Lookup { rows: Vec<Vec<f64>>, halo: f64 },
}

impl SmallScheme {
    pub fn build(&self) -> Box<dyn QuantizationScheme> {
        match self {
            SmallScheme::Regular { dim, points, lo, hi } => Box::new(build_regular(*dim, *points, *lo, *hi).unwrap()),
            SmallScheme::Logarithmic { dim, e, t } => Box::new(build_logarithmic(*dim, *e, *t).unwrap()),
            SmallScheme::Lookup { rows, halo } => {
                let table = rows.iter().map(|r| Vector::new(r.clone()).unwrap()).collect();
                Box::new(build_lookup(table, *halo).unwrap())
            }
        }
    }
}

pub fn regular_strategy() -> impl Strategy<Value = SmallScheme> {
    (1usize..=3, 2usize..=12, -5.0f64..0.0, 0.1f64..10.0).prop_map(|(dim, points, lo, width)| SmallScheme::Regular {
        dim,
        points,
        lo,
        hi: lo + width,
    })
}

pub fn symmetric_regular_strategy() -> impl Strategy<Value = SmallScheme> {
    (1usize..=3, 2usize..=12, 0.1f64..10.0).prop_map(|(dim, points, hi)| SmallScheme::Regular {
        dim,
        points,
        lo: -hi,
        hi,
    })
}

pub fn logarithmic_strategy() -> impl Strategy<Value = SmallScheme> {
    (1usize..=2, 1u32..=3, 0u32..=2).prop_map(|(dim, e, t)| SmallScheme::Logarithmic { dim, e, t })
}

pub fn lookup_strategy() -> impl Strategy<Value = SmallScheme> {
    (1usize..=3, 1usize..=30, 0.0f64..1.0)
        .prop_flat_map(|(dim, count, halo)| {
            (prop::collection::vec(prop::collection::vec(-3.0f64..3.0, dim), count), Just(halo))
        })
        .prop_map(|(mut rows, halo)| {
            let mut seen = BTreeSet::new();
            rows.retain(|r| seen.insert(r.iter().map(|v| v.to_bits()).collect::<Vec<_>>()));
            SmallScheme::Lookup { rows, halo }
        })
}

pub fn any_small_scheme() -> impl Strategy<Value = SmallScheme> {
    prop_oneof![regular_strategy(), logarithmic_strategy(), lookup_strategy()]
}

fn sample_in(scheme: &dyn QuantizationScheme, rng: &mut ChaCha8Rng, stretch: f64) -> Vec<f64> {
    let b = scheme.domain();
    b.lo()
        .iter()
        .zip(b.hi())
        .map(|(&lo, &hi)| {
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo) * stretch;
            rng.random_range(mid - half..=mid + half)
        })
        .collect()
}

pub fn prop_idempotence() -> Check {
    run(48, 1, any_small_scheme(), |spec| {
        let s = spec.build();
        let atoms = enumerate_atoms(s.as_ref(), 10_000).expect("small scheme");
        for id in atoms {
            let r = lib(s.restore(&id))?;
            prop_assert_eq!(lib(s.quantize(&r))?.id().clone(), id);
        }
        Ok(())
    })?;
    // a Table-2 sized lattice, at random atoms
    let big = build_regular(112, 256, -1.0, 1.0).unwrap();
    run(64, 2, prop::collection::vec(0u64..u64::MAX, 1), |v| {
        let mut rng = ChaCha8Rng::seed_from_u64(v[0]);
        let digits: Vec<u32> = (0..112).map(|_| rng.random_range(0..256)).collect();
        let id = qlearn::AtomId::from_digits(digits);
        let r = lib(big.restore(&id))?;
        prop_assert_eq!(lib(big.quantize(&r))?.id().clone(), id);
        Ok(())
    })
}

pub fn prop_nearest_neighbor() -> Check {
    run(40, 3, (any_small_scheme(), any::<u64>()), |(spec, seed)| {
        let s = spec.build();
        let atoms: Vec<Vec<f64>> = enumerate_atoms(s.as_ref(), 10_000)
            .expect("m <= 1e4")
            .iter()
            .map(|id| s.restore(id).unwrap().into_inner())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let x = sample_in(s.as_ref(), &mut rng, 1.0);
            let got = lib(s.round_trip_error(&x))?;
            let best = atoms.iter().map(|a| distance(&x, a)).fold(f64::INFINITY, f64::min);
            prop_assert!(got <= best * (1.0 + 1e-12) + 1e-15, "x={:?} got {} best {}", x, got, best);
        }
        Ok(())
    })
}

/// Exact schemes never exceed their error parameter; Monte Carlo estimates
/// for lookup tables may undershoot the true maximum slightly.
pub fn prop_delta_bound() -> Check {
    const PROBES: usize = 100_000;
    let exact = prop_oneof![regular_strategy(), logarithmic_strategy()];
    run(24, 4, (exact, any::<u64>()), |(spec, seed)| {
        let s = spec.build();
        let delta = s.delta();
        prop_assert!(delta.is_exact());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..PROBES {
            let x = sample_in(s.as_ref(), &mut rng, 1.0);
            let e = lib(s.round_trip_error(&x))?;
            prop_assert!(e <= delta.value() * (1.0 + 1e-12), "{} > {}", e, delta.value());
        }
        Ok(())
    })?;
    run(6, 5, (lookup_strategy(), any::<u64>()), |(spec, seed)| {
        let s = spec.build();
        let delta = s.delta().value();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..PROBES {
            let x = sample_in(s.as_ref(), &mut rng, 1.0);
            let e = lib(s.round_trip_error(&x))?;
            prop_assert!(e <= delta * 1.02 + 1e-12, "{} > {}", e, delta);
        }
        Ok(())
    })
}

pub fn prop_saturation() -> Check {
    run(48, 6, (any_small_scheme(), any::<u64>()), |(spec, seed)| {
        let s = spec.build();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let x = sample_in(s.as_ref(), &mut rng, 3.0);
            let clamped = s.domain().clamp(&x);
            prop_assert_eq!(lib(s.quantize(&x))?.id().clone(), lib(s.quantize(&clamped))?.id().clone());
        }
        Ok(())
    })
}

/// Origin-centered regular grids and logarithmic grids contain `-x` with every `x`.
pub fn prop_symmetry() -> Check {
    run(48, 7, prop_oneof![symmetric_regular_strategy(), logarithmic_strategy()], |spec| {
        let s = spec.build();
        for id in enumerate_atoms(s.as_ref(), 10_000).unwrap() {
            let r = lib(s.restore(&id))?;
            let neg: Vec<f64> = r.iter().map(|v| -v).collect();
            let back = lib(s.quantize(&neg))?;
            prop_assert_eq!(back.restoration().as_slice(), neg.as_slice());
        }
        Ok(())
    })
}

pub fn prop_monotone_refinement() -> Check {
    run(64, 8, (1usize..=4, 2usize..=200, -5.0f64..0.0, 0.1f64..10.0), |(d, n, lo, w)| {
        let a = build_regular(d, n, lo, lo + w).unwrap().delta().value();
        let b = build_regular(d, n + 1, lo, lo + w).unwrap().delta().value();
        prop_assert!(b < a, "n={} delta {} -> {}", n, a, b);
        Ok(())
    })
}

/// Brute-force maximum over a probe grid that contains every cell midpoint.
pub fn prop_regular_delta_brute_force() -> Check {
    run(24, 9, (1usize..=2, 2usize..=8, -3.0f64..0.0, 0.5f64..4.0), |(d, n, lo, w)| {
        prop_assume!(n * d <= 16);
        let hi = lo + w;
        let s = build_regular(d, n, lo, hi).unwrap();
        let per_dim: usize = if d == 1 { 10_000 } else { 1_000 };
        let k = (per_dim / (2 * (n - 1))).max(1);
        let probes = 2 * k * (n - 1) + 1;
        let axis: Vec<f64> = (0..probes)
            .map(|i| lo + (hi - lo) * i as f64 / (probes - 1) as f64)
            .collect();
        let mut worst = 0.0f64;
        let mut idx = vec![0usize; d];
        'outer: loop {
            let x: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            worst = worst.max(lib(s.round_trip_error(&x))?);
            for j in 0..d {
                idx[j] += 1;
                if idx[j] < probes {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        let delta = s.delta().value();
        prop_assert!((worst - delta).abs() <= 1e-9 * delta, "brute {} vs {}", worst, delta);
        Ok(())
    })
}

/// Independent decoding of every sign/exponent/mantissa pattern.
pub fn prop_logarithmic_decode() -> Check {
    run(40, 10, (1u32..=6, 0u32..=5), |(e, t)| {
        let l = LogarithmicLattice::new(1, e, t).unwrap();
        let bias = (1i32 << (e - 1)) - 1;
        let mut expected = BTreeSet::new();
        expected.insert(0.0f64.to_bits());
        for pattern in 0u32..1 << (1 + e + t) {
            let sign = if pattern >> (e + t) & 1 == 1 { -1.0 } else { 1.0 };
            let exponent = (pattern >> t) & ((1 << e) - 1);
            let fraction = pattern & ((1 << t) - 1);
            let v = sign * (1.0 + f64::from(fraction) / f64::from(1u32 << t)) * 2f64.powi(exponent as i32 - bias);
            prop_assert_eq!(l.decode(pattern).to_bits(), v.to_bits());
            expected.insert(v.to_bits());
        }
        let got: BTreeSet<u64> = l.axis_values().iter().map(|v| v.to_bits()).collect();
        prop_assert_eq!(l.axis_values().len(), (1usize << (e + t + 1)) + 1);
        prop_assert_eq!(got, expected);
        Ok(())
    })
}

fn planted_strategy() -> impl Strategy<Value = SyntheticSpec> {
    (2usize..=3, 30usize..=80, 0.1f64..0.3, any::<u64>()).prop_map(|(dim, samples, margin, seed)| SyntheticSpec {
        dim,
        samples,
        margin,
        seed,
        ..SyntheticSpec::default()
    })
}

/// Every quantized Frank-Wolfe step lands within `3 delta` of its exact
/// real-valued update.
pub fn prop_fw_update_error() -> Check {
    run(24, 11, (planted_strategy(), 1e-4f64..0.05), |(spec, delta)| {
        let data = lib(qlearn::data::generate_synthetic(&spec))?;
        let step = 2.0 * delta / (spec.dim as f64).sqrt();
        let half = (2.0 / step).ceil() as usize;
        let s = build_regular(spec.dim, 2 * half + 1, -(half as f64) * step, half as f64 * step).unwrap();
        let delta = s.delta().value();
        let q = lib(data.quantized(&s))?;
        let m = lib(quantized_frank_wolfe(&s, &q, &FrankWolfeConfig::new(200, 0.01)))?;
        for r in &m.trace {
            if let Some(u) = r.update_error {
                prop_assert!(u <= 3.0 * delta + 1e-12, "step {}: {} > 3 * {}", r.step, u, delta);
            }
        }
        prop_assert_eq!(m.quantize_calls, 3 * m.steps);
        Ok(())
    })
}

/// `|r(w_t)| <= sqrt(t) + t delta` after `t` updates, with exactly one
/// quantization per update.
pub fn prop_perceptron_norm_growth() -> Check {
    run(32, 12, (planted_strategy(), 0.001f64..0.2, 1usize..=5), |(spec, delta, epochs)| {
        let data = lib(qlearn::data::generate_synthetic(&spec))?;
        let step = 2.0 * delta / (spec.dim as f64).sqrt();
        let half = ((3.0 / step).ceil() as usize).min(5_000);
        let s = build_regular(spec.dim, 2 * half + 1, -(half as f64) * step, half as f64 * step).unwrap();
        let delta = s.delta().value();
        let q = lib(data.quantized(&s))?;
        prop_assume!(q.within_unit_ball());
        let m = lib(quantized_perceptron(&s, &q, &PerceptronConfig::default().with_epochs(epochs)))?;
        for r in &m.trace {
            let t = r.mistakes as f64;
            prop_assert!(r.weight_norm <= t.sqrt() + t * delta + 1e-12);
        }
        prop_assert_eq!(m.quantize_calls, m.mistakes);
        Ok(())
    })
}

pub fn prop_kmeans_monotone() -> Check {
    let points = (1usize..=3, 5usize..=60).prop_flat_map(|(d, n)| {
        (prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), n), 1usize..=6, any::<u64>())
    });
    run(64, 13, points, |(pts, k, seed)| {
        let k = k.min(pts.len());
        let r = lib(kmeans(&pts, k, seed))?;
        for w in r.objective.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "objective rose {} -> {}", w[0], w[1]);
        }
        prop_assert!(r.iterations <= qlearn::data::kmeans::MAX_ITERATIONS);
        Ok(())
    })
}

fn dataset_strategy() -> impl Strategy<Value = LabeledDataset> {
    (1usize..=6, 1usize..=20)
        .prop_flat_map(|(d, n)| {
            let value = prop_oneof![Just(0.0), -1e3f64..1e3, Just(1.0)];
            prop::collection::vec((prop::collection::vec(value, d), prop::bool::ANY), n)
        })
        .prop_map(|rows| {
            let rows: Vec<(Vec<f64>, i8)> = rows.into_iter().map(|(x, p)| (x, if p { 1 } else { -1 })).collect();
            LabeledDataset::from_rows("prop", &rows).unwrap()
        })
}

pub fn prop_parser_roundtrips() -> Check {
    run(64, 14, dataset_strategy(), |data| {
        let text = serialize_sparse(&data);
        let back = lib(parse_sparse(
            Cursor::new(text),
            "prop",
            SparseOptions { dim: Some(data.dim()) },
        ))?;
        prop_assert_eq!(back.examples(), data.examples());

        let mut csv = Vec::new();
        lib(write_dense_csv(&data, &mut csv))?;
        let back = lib(parse_dense_csv(Cursor::new(csv), "prop"))?;
        prop_assert_eq!(back.examples(), data.examples());
        Ok(())
    })?;
    let specs = prop_oneof![
        (1usize..200, 2usize..1000, -1e3f64..0.0, 0.001f64..1e3)
            .prop_map(|(dim, points, lo, w)| SchemeSpec::Regular { dim, points, lo, hi: lo + w }),
        (1usize..200, 1u32..=8, 0u32..=20).prop_map(|(dim, exponent_bits, mantissa_bits)| SchemeSpec::Logarithmic {
            dim,
            exponent_bits,
            mantissa_bits
        }),
    ];
    run(128, 15, specs, |spec| {
        prop_assert_eq!(lib(SchemeSpec::parse_flat(&spec.to_string()))?, spec);
        Ok(())
    })
}

pub fn prop_normalize_roundtrip() -> Check {
    let mode = prop_oneof![
        Just(NormalizationMode::UnitMaxNorm),
        (0.1f64..10.0).prop_map(|h| NormalizationMode::ScaleToBox { lo: -h, hi: h }),
        Just(NormalizationMode::None),
    ];
    run(64, 16, (dataset_strategy(), mode), |(data, mode)| {
        prop_assume!(data.max_norm() > 0.0);
        let (scaled, spec) = lib(normalize(&data, &mode))?;
        let back = lib(spec.invert(&scaled))?;
        for (a, b) in back.iter().zip(data.iter()) {
            prop_assert_eq!(a.y, b.y);
            for (u, v) in a.x.iter().zip(b.x.iter()) {
                prop_assert!((u - v).abs() <= 1e-12 * v.abs().max(1e-300), "{} vs {}", u, v);
            }
        }
        Ok(())
    })
}

/// Scaling to unit max norm keeps the data separable and divides the margin
/// by the scale factor.
pub fn prop_normalize_margin() -> Check {
    run(12, 17, (planted_strategy(), 0.5f64..7.0), |(spec, mag)| {
        let data = lib(qlearn::data::generate_synthetic(&SyntheticSpec { max_magnitude: mag, ..spec }))?;
        let factor = data.max_norm();
        let before = lib(estimate_margin(&data, 20_000))?.gamma_hat;
        let (scaled, _) = lib(normalize(&data, &NormalizationMode::UnitMaxNorm))?;
        let after = lib(estimate_margin(&scaled, 20_000))?.gamma_hat;
        prop_assert!(after > 0.0);
        prop_assert!((after - before / factor).abs() <= 1e-3 * after, "{} vs {}", after, before / factor);
        Ok(())
    })
}

pub fn prop_margin_lower_bound() -> Check {
    run(16, 18, planted_strategy(), |spec| {
        let planted = lib(generate_planted(&spec))?;
        let m = lib(estimate_margin(&planted.data, 20_000))?;
        prop_assert!(m.gamma_hat <= planted.margin + 1e-6, "{} > {}", m.gamma_hat, planted.margin);
        prop_assert!(m.gamma_hat >= planted.margin * (1.0 - 1e-3));
        Ok(())
    })
}

/// Incidence counts match a direct scan of every cell's corners.
pub fn prop_incidence_brute_force() -> Check {
    let case = (2usize..=3, 2usize..=12, any::<u64>());
    run(32, 19, case, |(d, n, seed)| {
        let s = build_regular(d, n, -1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        prop_assume!(normal.iter().any(|v| *v != 0.0));
        let report = lib(count_separator_incidence(&s, &normal))?;
        let mut count = 0u64;
        let mut idx = vec![0usize; d];
        'outer: loop {
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for (j, &i) in idx.iter().enumerate() {
                let (a, b) = s.cell_interval(i);
                let (p, q) = (normal[j] * a, normal[j] * b);
                lo += p.min(q);
                hi += p.max(q);
            }
            if lo <= 0.0 && hi >= 0.0 {
                count += 1;
            }
            for j in 0..d {
                idx[j] += 1;
                if idx[j] < n {
                    continue 'outer;
                }
                idx[j] = 0;
            }
            break;
        }
        prop_assert_eq!(report.count, count);
        Ok(())
    })
}

/// Reported sinks absorb a full epoch started from them.
pub fn prop_sinks_absorb() -> Check {
    let case = (1usize..=3, 2usize..=6, 1.0f64..6.0, any::<u64>());
    run(32, 20, case, |(d, n, hi, seed)| {
        let s = build_regular(d, n, -hi, hi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<(Vec<f64>, i8)> = (0..12)
            .map(|i| {
                let x: Vec<f64> = (0..d).map(|_| f64::from(rng.random_range(0..2u8))).collect();
                (x, if i % 2 == 0 { 1 } else { -1 })
            })
            .collect();
        let data = lib(lib(LabeledDataset::from_rows("bits", &rows))?.quantized(&s))?;
        let report = lib(detect_sinks(&s, &data, &SinkSearch::default()))?;
        for sink in &report.sinks {
            let start = lib(s.restore(sink))?.into_inner();
            let cfg = PerceptronConfig {
                epochs: 1,
                init: Initialization::Point(start.clone()),
                ..PerceptronConfig::default()
            };
            let m = lib(quantized_perceptron(&s, &data, &cfg))?;
            prop_assert_eq!(m.weights.as_slice(), start.as_slice());
        }
        Ok(())
    })
}

pub fn prop_determinism() -> Check {
    run(24, 21, (any_small_scheme(), planted_strategy()), |(spec, data_spec)| {
        let a = spec.build();
        let b = spec.build();
        let mut rng = ChaCha8Rng::seed_from_u64(data_spec.seed);
        for _ in 0..50 {
            let x = sample_in(a.as_ref(), &mut rng, 2.0);
            prop_assert_eq!(lib(a.quantize(&x))?, lib(b.quantize(&x))?);
        }
        let data = lib(qlearn::data::generate_synthetic(&data_spec))?;
        let s = build_regular(data.dim(), 65, -2.0, 2.0).unwrap();
        let q = lib(data.quantized(&s))?;
        let cfg = PerceptronConfig::default().with_seed(data_spec.seed);
        prop_assert_eq!(lib(quantized_perceptron(&s, &q, &cfg))?, lib(quantized_perceptron(&s, &q, &cfg))?);
        Ok(())
    })
}

pub const PROPERTIES: &[(&str, fn() -> Check)] = &[
    ("idempotence", prop_idempotence),
    ("nearest-neighbor optimality", prop_nearest_neighbor),
    ("error bound (1e5 probes)", prop_delta_bound),
    ("saturation", prop_saturation),
    ("symmetry", prop_symmetry),
    ("monotone refinement", prop_monotone_refinement),
    ("regular delta vs probe grid", prop_regular_delta_brute_force),
    ("logarithmic decode", prop_logarithmic_decode),
    ("frank-wolfe 3-delta update", prop_fw_update_error),
    ("perceptron norm growth", prop_perceptron_norm_growth),
    ("k-means objective monotone", prop_kmeans_monotone),
    ("parser round-trips", prop_parser_roundtrips),
    ("normalize round-trip", prop_normalize_roundtrip),
    ("normalize scales margin", prop_normalize_margin),
    ("margin estimate is a lower bound", prop_margin_lower_bound),
    ("incidence vs cell scan", prop_incidence_brute_force),
    ("sinks absorb", prop_sinks_absorb),
    ("determinism", prop_determinism),
];

/// A stand-in with the shape of the mushrooms data: 22 categorical
/// attributes one-hot encoded into 112 boolean features, about half positive.
///
/// The label is the sign of a planted +-1 vote over the categories of 21
/// attributes (odd, so never tied). Rows come from 24 "species" whose
/// attributes mostly follow a prototype voting for the species' class, so,
/// like the real data, most attributes are individually predictive and a
/// weight vector inside `[-1,1]^112` separates every row by a wide margin.
pub fn mushrooms_surrogate(rows: usize, seed: u64) -> LabeledDataset {
    // 2 x 9 + 14 x 5 + 6 x 4 = 112 features
    let cards: Vec<usize> = (0..22)
        .map(|i| match i {
            0 | 1 => 9,
            2..=15 => 5,
            _ => 4,
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // the last attribute does not vote
    let votes: Vec<Vec<i32>> = cards
        .iter()
        .enumerate()
        .map(|(i, &c)| (0..c).map(|_| if i == 21 { 0 } else if rng.random() { 1 } else { -1 }).collect())
        .collect();
    let score = |cats: &[usize]| -> i32 { cats.iter().zip(&votes).map(|(&k, v)| v[k]).sum() };
    // half the species are positive; their prototypes pick categories that
    // vote for their class wherever the attribute has one
    let species: Vec<Vec<usize>> = (0..24)
        .map(|s| {
            let want = if s % 2 == 0 { 1 } else { -1 };
            votes
                .iter()
                .map(|v| {
                    let agree: Vec<usize> = (0..v.len()).filter(|&k| v[k] == want).collect();
                    if agree.is_empty() {
                        rng.random_range(0..v.len())
                    } else {
                        agree[rng.random_range(0..agree.len())]
                    }
                })
                .collect()
        })
        .collect();
    let data: Vec<(Vec<f64>, i8)> = (0..rows)
        .map(|_| {
            let proto = &species[rng.random_range(0..species.len())];
            let cats: Vec<usize> = cards
                .iter()
                .zip(proto)
                .map(|(&c, &p)| if rng.random::<f64>() < 0.85 { p } else { rng.random_range(0..c) })
                .collect();
            let mut x = Vec::with_capacity(112);
            for (&k, &c) in cats.iter().zip(&cards) {
                x.extend((0..c).map(|j| if j == k { 1.0 } else { 0.0 }));
            }
            (x, if score(&cats) > 0 { 1 } else { -1 })
        })
        .collect();
    LabeledDataset::from_rows(format!("mushrooms-surrogate-{seed}"), &data).unwrap()
}

pub struct CoarseCell {
    pub hi: f64,
    pub accuracy: f64,
    pub converged: bool,
    pub sinks: Option<usize>,
}

pub struct CoarseFineOutcome {
    pub baseline: f64,
    pub fine_accuracy: f64,
    pub coarse: Vec<CoarseCell>,
}

impl CoarseFineOutcome {
    /// Fine lattice reaches 99%, and some 8-point lattice sits within five
    /// points of the majority baseline with at least one sink.
    pub fn bifurcates(&self) -> bool {
        self.fine_accuracy >= 99.0
            && self
                .coarse
                .iter()
                .any(|c| (c.accuracy - self.baseline).abs() <= 5.0 && c.sinks.is_some_and(|s| s >= 1))
    }

    /// The accuracy half of the pattern: fine lattice at 99%, some 8-point
    /// lattice stuck within five points of the baseline without converging.
    pub fn accuracy_bifurcates(&self) -> bool {
        self.fine_accuracy >= 99.0
            && self
                .coarse
                .iter()
                .any(|c| (c.accuracy - self.baseline).abs() <= 5.0 && !c.converged)
    }

    pub fn summary(&self) -> String {
        let cells: Vec<String> = self
            .coarse
            .iter()
            .map(|c| match c.sinks {
                Some(s) => format!("[-{0},{0}]x8 {1:.1}% ({s} sinks)", c.hi, c.accuracy),
                None => format!("[-{0},{0}]x8 {1:.1}%", c.hi, c.accuracy),
            })
            .collect();
        format!(
            "[-1,1]x256 {:.1}%, baseline {:.1}%, {}",
            self.fine_accuracy,
            self.baseline,
            cells.join(", ")
        )
    }
}

fn lattice_accuracy(
    s: &dyn QuantizationScheme,
    train: &LabeledDataset,
    test: &LabeledDataset,
) -> qlearn::Result<(LabeledDataset, f64, bool)> {
    let qtrain = train.quantized(s)?;
    let cfg = PerceptronConfig {
        init: Initialization::NearestToZero,
        ..PerceptronConfig::default()
    };
    let m = quantized_perceptron(s, &qtrain, &cfg)?;
    let accuracy = m.accuracy(&test.quantized(s)?);
    Ok((qtrain, accuracy, m.converged))
}

/// Perceptron for 3 epochs at learning rate 1 on the raw features, with a
/// fine `[-1,1] x 256` lattice and `8`-point lattices over growing ranges.
pub fn coarse_fine_pattern(train: &LabeledDataset, test: &LabeledDataset) -> qlearn::Result<CoarseFineOutcome> {
    let d = train.dim();
    let majority_positive = 2 * train.count_positive() >= train.len();
    let hits = test.iter().filter(|e| (e.y.sign() > 0.0) == majority_positive).count();
    let baseline = 100.0 * hits as f64 / test.len() as f64;
    let (_, fine_accuracy, _) = lattice_accuracy(&build_regular(d, 256, -1.0, 1.0)?, train, test)?;
    let mut coarse = Vec::new();
    for hi in [0.5, 0.75, 1.0, 2.0, 4.0, 8.0] {
        let s = build_regular(d, 8, -hi, hi)?;
        let (qtrain, accuracy, converged) = lattice_accuracy(&s, train, test)?;
        let sinks = if (accuracy - baseline).abs() <= 5.0 {
            let search = SinkSearch {
                runs: 3,
                ..SinkSearch::default()
            };
            Some(detect_sinks(&s, &qtrain, &search)?.sinks.len())
        } else {
            None
        };
        coarse.push(CoarseCell {
            hi,
            accuracy,
            converged,
            sinks,
        });
    }
    Ok(CoarseFineOutcome {
        baseline,
        fine_accuracy,
        coarse,
    })
}
