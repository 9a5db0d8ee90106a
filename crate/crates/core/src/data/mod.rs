//! Dataset ingestion, synthetic generation, normalization and the
//! cluster-based lookup lattice.

pub mod csv;
pub mod kmeans;
pub mod normalize;
pub mod sparse;
pub mod synthetic;

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

pub use self::csv::{parse_dense_csv, read_dense_csv, write_dense_csv};
pub use kmeans::{kmeans, KMeans};
pub use normalize::{normalize, NormalizationMode, NormalizationSpec};
pub use sparse::{parse_sparse, parse_sparse_rows, serialize_sparse, SparseDataset, SparseExample, SparseOptions};
pub use synthetic::{generate_planted, generate_synthetic, Planted, SyntheticSpec};

use crate::error::{Error, Result};
use crate::lattices::LookupLattice;
use crate::types::{DomainBox, Label, LabeledDataset, Vector};

/// Load a dataset, choosing the format from the extension (`.csv` is dense)
/// or, failing that, from whether the first data line contains `index:value`
/// tokens.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let name = self::csv::stem(path);
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        return parse_dense_csv(File::open(path)?, &name);
    }
    let mut reader = BufReader::new(File::open(path)?);
    let mut sniff = String::new();
    let mut looks_sparse = false;
    loop {
        sniff.clear();
        if reader.read_line(&mut sniff)? == 0 {
            break;
        }
        let content = sniff.split('#').next().unwrap_or("").trim();
        if !content.is_empty() {
            looks_sparse = content.contains(':') || !content.contains(',');
            break;
        }
    }
    // reopen rather than stitch the sniffed line back on
    let file = File::open(path)?;
    if looks_sparse {
        parse_sparse(BufReader::new(file), &name, SparseOptions::default())
    } else {
        parse_dense_csv(file, &name)
    }
}

/// Lookup lattice whose atoms are the k-means centers of each class,
/// `2 k` atoms in all (positive-class centers first).
///
/// `k` larger than a class is clamped to the class size. Coincident centers
/// are nudged apart by `1e-9` per coordinate so the table stays distinct. The
/// domain is the bounding box of the data, widened by 5% per side.
pub fn build_cluster_lattice(data: &LabeledDataset, k_per_class: usize, seed: u64) -> Result<LookupLattice> {
    if k_per_class == 0 {
        return Err(Error::InvalidInput("k per class must be >= 1".into()));
    }
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(2 * k_per_class);
    for (offset, label) in [Label::Positive, Label::Negative].into_iter().enumerate() {
        let points: Vec<Vec<f64>> = data
            .iter()
            .filter(|e| e.y == label)
            .map(|e| e.x.as_slice().to_vec())
            .collect();
        if points.is_empty() {
            return Err(Error::InvalidInput(format!("class {label} has no examples to cluster")));
        }
        let k = if k_per_class > points.len() {
            log::warn!(
                "k = {k_per_class} exceeds the {} examples of class {label}; clamping",
                points.len()
            );
            points.len()
        } else {
            k_per_class
        };
        let km = kmeans(&points, k, seed.wrapping_add(offset as u64))?;
        table.extend(km.centers);
    }

    for i in 1..table.len() {
        let mut bump = 0u32;
        while table[..i].iter().any(|c| same(c, &table[i])) {
            bump += 1;
            let nudge = 1e-9 * f64::from(bump);
            table[i].iter_mut().for_each(|v| *v += nudge);
        }
    }

    let d = data.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for x in data.iter().map(|e| e.x.as_slice()).chain(table.iter().map(Vec::as_slice)) {
        for k in 0..d {
            lo[k] = lo[k].min(x[k]);
            hi[k] = hi[k].max(x[k]);
        }
    }
    for k in 0..d {
        let pad = (0.05 * (hi[k] - lo[k])).max(1e-6);
        lo[k] -= pad;
        hi[k] += pad;
    }
    let table = table.into_iter().map(Vector::new).collect::<Result<Vec<_>>>()?;
    LookupLattice::with_domain(table, DomainBox::new(lo, hi)?)
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x == y)
}
