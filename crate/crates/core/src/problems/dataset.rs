//! Binary-classification dataset storage and the LIBSVM text format.
//!
//! Features are stored densely or as sparse rows; labels are always in
//! {-1, +1}. The LIBSVM grammar accepted here is one instance per line,
//! `label idx:val idx:val ...` with 1-based, strictly increasing indices.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Row-major feature storage.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureMatrix {
    Dense {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
    /// One `(column, value)` list per row, sorted by column.
    Sparse {
        cols: usize,
        rows: Vec<Vec<(usize, f64)>>,
    },
}

impl FeatureMatrix {
    pub fn num_rows(&self) -> usize {
        match self {
            FeatureMatrix::Dense { rows, .. } => *rows,
            FeatureMatrix::Sparse { rows, .. } => rows.len(),
        }
    }

    pub fn num_cols(&self) -> usize {
        match self {
            FeatureMatrix::Dense { cols, .. } => *cols,
            FeatureMatrix::Sparse { cols, .. } => *cols,
        }
    }

    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        match self {
            FeatureMatrix::Dense { cols, data, .. } => {
                let row = &data[i * cols..(i + 1) * cols];
                row.iter().zip(w).map(|(x, v)| x * v).sum()
            }
            FeatureMatrix::Sparse { rows, .. } => {
                rows[i].iter().map(|&(j, x)| x * w[j]).sum()
            }
        }
    }

    /// `out += coeff * row_i`.
    pub fn row_add_scaled(&self, i: usize, coeff: f64, out: &mut [f64]) {
        match self {
            FeatureMatrix::Dense { cols, data, .. } => {
                let row = &data[i * cols..(i + 1) * cols];
                for (o, x) in out.iter_mut().zip(row) {
                    *o += coeff * x;
                }
            }
            FeatureMatrix::Sparse { rows, .. } => {
                for &(j, x) in &rows[i] {
                    out[j] += coeff * x;
                }
            }
        }
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        match self {
            FeatureMatrix::Dense { cols, data, .. } => {
                data[i * cols..(i + 1) * cols].iter().map(|x| x * x).sum()
            }
            FeatureMatrix::Sparse { rows, .. } => rows[i].iter().map(|&(_, x)| x * x).sum(),
        }
    }

    pub fn rows_dot(&self, i: usize, j: usize) -> f64 {
        match self {
            FeatureMatrix::Dense { cols, data, .. } => {
                let a = &data[i * cols..(i + 1) * cols];
                let b = &data[j * cols..(j + 1) * cols];
                a.iter().zip(b).map(|(x, y)| x * y).sum()
            }
            FeatureMatrix::Sparse { rows, .. } => {
                // merge of two sorted index lists
                let (a, b) = (&rows[i], &rows[j]);
                let (mut p, mut q, mut acc) = (0, 0, 0.0);
                while p < a.len() && q < b.len() {
                    match a[p].0.cmp(&b[q].0) {
                        std::cmp::Ordering::Less => p += 1,
                        std::cmp::Ordering::Greater => q += 1,
                        std::cmp::Ordering::Equal => {
                            acc += a[p].1 * b[q].1;
                            p += 1;
                            q += 1;
                        }
                    }
                }
                acc
            }
        }
    }

    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        match self {
            FeatureMatrix::Dense { cols, data, .. } => data[i * cols..(i + 1) * cols].to_vec(),
            FeatureMatrix::Sparse { cols, rows } => {
                let mut out = vec![0.0; *cols];
                for &(j, x) in &rows[i] {
                    out[j] = x;
                }
                out
            }
        }
    }
}

/// Features plus {-1, +1} labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: FeatureMatrix,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(features: FeatureMatrix, labels: Vec<f64>) -> Result<Self> {
        if features.num_rows() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "row count {} does not match label count {}",
                features.num_rows(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|y| **y != 1.0 && **y != -1.0) {
            return Err(Error::InvalidInput(format!(
                "labels must be -1 or +1, got {bad}"
            )));
        }
        let finite = match &features {
            FeatureMatrix::Dense { data, .. } => data.iter().all(|x| x.is_finite()),
            FeatureMatrix::Sparse { rows, .. } => {
                rows.iter().flatten().all(|(_, x)| x.is_finite())
            }
        };
        if !finite {
            return Err(Error::InvalidInput("features contain NaN/Inf".into()));
        }
        Ok(Dataset { features, labels })
    }

    pub fn num_examples(&self) -> usize {
        self.labels.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.num_cols()
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Parse LIBSVM-format text. Labels are remapped to {-1, +1}: sets already in
/// {-1, +1} are kept, {0, 1} maps 0 to -1, and {1, 2} maps 1 to -1. Any other
/// label set is rejected. The feature dimension is the maximum index seen.
pub fn parse_libsvm<R: BufRead>(reader: R) -> Result<Dataset> {
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::Libsvm {
            line: lineno,
            reason: e.to_string(),
        })?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a first token");
        let label: f64 = label_tok.parse().map_err(|_| Error::Libsvm {
            line: lineno,
            reason: format!("malformed label '{label_tok}'"),
        })?;

        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut last_index = 0usize;
        for tok in tokens {
            let (idx_str, val_str) = tok.split_once(':').ok_or_else(|| Error::Libsvm {
                line: lineno,
                reason: format!("malformed token '{tok}' (expected idx:val)"),
            })?;
            let idx: usize = idx_str.parse().map_err(|_| Error::Libsvm {
                line: lineno,
                reason: format!("malformed feature index '{idx_str}'"),
            })?;
            if idx == 0 {
                return Err(Error::Libsvm {
                    line: lineno,
                    reason: "feature indices are 1-based".into(),
                });
            }
            if idx <= last_index {
                return Err(Error::Libsvm {
                    line: lineno,
                    reason: format!(
                        "feature indices must be strictly increasing ({idx} after {last_index})"
                    ),
                });
            }
            let val: f64 = val_str.parse().map_err(|_| Error::Libsvm {
                line: lineno,
                reason: format!("malformed feature value '{val_str}'"),
            })?;
            last_index = idx;
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        raw_labels.push(label);
        rows.push(row);
    }

    let labels = map_labels(&raw_labels)?;
    Dataset::new(
        FeatureMatrix::Sparse {
            cols: max_index,
            rows,
        },
        labels,
    )
}

fn map_labels(raw: &[f64]) -> Result<Vec<f64>> {
    let pm_one = raw.iter().all(|y| *y == 1.0 || *y == -1.0);
    if pm_one {
        return Ok(raw.to_vec());
    }
    let zero_one = raw.iter().all(|y| *y == 0.0 || *y == 1.0);
    if zero_one {
        return Ok(raw.iter().map(|y| if *y == 0.0 { -1.0 } else { 1.0 }).collect());
    }
    let one_two = raw.iter().all(|y| *y == 1.0 || *y == 2.0);
    if one_two {
        return Ok(raw.iter().map(|y| if *y == 1.0 { -1.0 } else { 1.0 }).collect());
    }
    Err(Error::Libsvm {
        line: 0,
        reason: "label set is not one of {-1,+1}, {0,1}, {1,2}".into(),
    })
}

/// Serialize a dataset in LIBSVM format. Zero entries of dense rows are
/// skipped; values print in shortest round-trip form, so write-then-parse
/// reproduces the dataset exactly.
pub fn write_libsvm<W: Write>(ds: &Dataset, mut out: W) -> Result<()> {
    for i in 0..ds.num_examples() {
        let label = if ds.label(i) > 0.0 { "+1" } else { "-1" };
        out.write_all(label.as_bytes())?;
        match ds.features() {
            FeatureMatrix::Dense { cols, data, .. } => {
                for (j, x) in data[i * cols..(i + 1) * cols].iter().enumerate() {
                    if *x != 0.0 {
                        write!(out, " {}:{}", j + 1, x)?;
                    }
                }
            }
            FeatureMatrix::Sparse { rows, .. } => {
                for &(j, x) in &rows[i] {
                    write!(out, " {}:{}", j + 1, x)?;
                }
            }
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}
