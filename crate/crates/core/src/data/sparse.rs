//! The sparse `label index:value ...` text format.
//!
//! ```text
//! +1 3:1 7:1
//! -1 1:0.5 2:-0.25   # trailing comments are ignored
//! ```
//!
//! Indices are 1-based in the file and strictly increasing within a line; in
//! memory they are 0-based. Labels `+1`/`1` map to +1 and `-1`/`0` to -1. A
//! file whose labels are some other pair of numbers (the UCI mushrooms
//! export uses `1` and `2`) maps the larger to +1 and the smaller to -1.

use std::collections::BTreeSet;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::types::{Example, Label, LabeledDataset, Vector};

#[derive(Clone, Debug, PartialEq)]
pub struct SparseExample {
    pub label: Label,
    /// 0-based indices, strictly increasing.
    pub features: Vec<(usize, f64)>,
}

/// Parsed rows before densification.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseDataset {
    pub rows: Vec<SparseExample>,
    pub dim: usize,
    /// Raw label token → label, sorted by token.
    pub label_mapping: Vec<(String, Label)>,
}

impl SparseDataset {
    pub fn to_dense(&self, name: &str) -> Result<LabeledDataset> {
        let examples = self
            .rows
            .iter()
            .map(|r| {
                let mut x = vec![0.0; self.dim];
                for &(i, v) in &r.features {
                    x[i] = v;
                }
                Ok(Example::new(Vector::new(x)?, r.label))
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(name, examples)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SparseOptions {
    /// Declared dimension; indices beyond it are an error.
    pub dim: Option<usize>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_sparse_rows(reader: impl BufRead, options: SparseOptions) -> Result<SparseDataset> {
    let mut raw: Vec<(usize, String, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0usize;
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line has a token").to_string();
        if label.parse::<f64>().is_err() {
            return Err(err(line_no, format!("label `{label}` is not a number")));
        }
        let mut features = Vec::new();
        let mut prev: Option<usize> = None;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(line_no, format!("feature `{tok}` is not index:value")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| err(line_no, format!("bad feature index `{idx}`")))?;
            if idx == 0 {
                return Err(err(line_no, "feature indices are 1-based"));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| err(line_no, format!("bad feature value `{val}`")))?;
            if !val.is_finite() {
                return Err(err(line_no, format!("feature value `{val}` is not finite")));
            }
            if let Some(p) = prev {
                if idx <= p {
                    return Err(err(line_no, format!("index {idx} does not increase (previous {p})")));
                }
            }
            if let Some(d) = options.dim {
                if idx > d {
                    return Err(err(line_no, format!("index {idx} exceeds declared dimension {d}")));
                }
            }
            prev = Some(idx);
            max_index = max_index.max(idx);
            features.push((idx - 1, val));
        }
        raw.push((line_no, label, features));
    }
    if raw.is_empty() {
        return Err(err(0, "no examples in input"));
    }
    let dim = options.dim.unwrap_or(max_index).max(1);

    let tokens: BTreeSet<&str> = raw.iter().map(|(_, l, _)| l.as_str()).collect();
    let label_mapping = map_labels(&tokens).ok_or_else(|| {
        err(
            raw[0].0,
            format!("cannot map labels {tokens:?} to +1/-1; expected +1/-1, 1/0 or two distinct values"),
        )
    })?;
    let lookup = |t: &str| label_mapping.iter().find(|(k, _)| k == t).map(|(_, l)| *l);
    let rows = raw
        .into_iter()
        .map(|(_, label, features)| SparseExample {
            label: lookup(&label).expect("every token is mapped"),
            features,
        })
        .collect();
    Ok(SparseDataset {
        rows,
        dim,
        label_mapping,
    })
}

fn map_labels(tokens: &BTreeSet<&str>) -> Option<Vec<(String, Label)>> {
    let standard = |t: &str| match t {
        "+1" | "1" | "1.0" | "+1.0" => Some(Label::Positive),
        "-1" | "0" | "-1.0" | "0.0" => Some(Label::Negative),
        _ => None,
    };
    if let Some(m) = tokens
        .iter()
        .map(|t| standard(t).map(|l| (t.to_string(), l)))
        .collect::<Option<Vec<_>>>()
    {
        return Some(m);
    }
    let values: Vec<(f64, &str)> = tokens.iter().map(|t| (t.parse().unwrap(), *t)).collect();
    let distinct: BTreeSet<u64> = values.iter().map(|(v, _)| (v + 0.0).to_bits()).collect();
    if distinct.len() != 2 {
        return None;
    }
    let max = values.iter().map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
    Some(
        values
            .iter()
            .map(|(v, t)| (t.to_string(), if *v == max { Label::Positive } else { Label::Negative }))
            .collect(),
    )
}

/// Parse and densify.
pub fn parse_sparse(reader: impl BufRead, name: &str, options: SparseOptions) -> Result<LabeledDataset> {
    parse_sparse_rows(reader, options)?.to_dense(name)
}

/// Write `data` in the sparse format, omitting zero features. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn serialize_sparse(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for e in data {
        out.push_str(&e.y.to_string());
        for (i, v) in e.x.iter().enumerate() {
            if *v != 0.0 {
                out.push_str(&format!(" {}:{}", i + 1, v));
            }
        }
        out.push('\n');
    }
    out
}
