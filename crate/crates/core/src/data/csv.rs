//! Dense CSV datasets (last column is the label) and lookup-table CSVs (one
//! atom per row). A first row that does not parse as numbers is a header.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{Example, Label, LabeledDataset, Vector};

fn reader(input: impl Read) -> csv::Reader<impl Read> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

fn numeric_rows(input: impl Read) -> Result<Vec<(usize, Vec<f64>)>> {
    let mut rows = Vec::new();
    for (i, rec) in reader(input).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => rows.push((line, v)),
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::Parse {
                    line,
                    message: format!("non-numeric field in {:?}", rec.iter().collect::<Vec<_>>()),
                })
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data rows".into(),
        });
    }
    Ok(rows)
}

fn label_of(line: usize, v: f64) -> Result<Label> {
    match v {
        v if v == 1.0 => Ok(Label::Positive),
        v if v == -1.0 || v == 0.0 => Ok(Label::Negative),
        _ => Err(Error::Parse {
            line,
            message: format!("label {v} is not one of +1, -1, 0"),
        }),
    }
}

pub fn parse_dense_csv(input: impl Read, name: &str) -> Result<LabeledDataset> {
    let examples = numeric_rows(input)?
        .into_iter()
        .map(|(line, mut row)| {
            if row.len() < 2 {
                return Err(Error::Parse {
                    line,
                    message: "need at least one feature and a label".into(),
                });
            }
            let y = label_of(line, row.pop().unwrap())?;
            let x = Vector::new(row).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            Ok(Example::new(x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledDataset::new(name, examples)
}

pub fn read_dense_csv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    parse_dense_csv(File::open(path)?, &stem(path))
}

pub fn write_dense_csv(data: &LabeledDataset, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in data {
        let mut rec: Vec<String> = e.x.iter().map(|v| v.to_string()).collect();
        rec.push(if e.y == Label::Positive { "1" } else { "-1" }.into());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_table(input: impl Read) -> Result<Vec<Vector>> {
    numeric_rows(input)?
        .into_iter()
        .map(|(line, row)| {
            Vector::new(row).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_table(path: impl AsRef<Path>) -> Result<Vec<Vector>> {
    parse_table(File::open(path)?)
}

pub fn write_table(rows: &[Vector], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into())
}
