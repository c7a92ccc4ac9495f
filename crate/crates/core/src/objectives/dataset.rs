//! Dataset container and delimited-file ingestion.
//!
//! File format: one row per example, comma-separated features, final column
//! target. A header row is optional and detected by a non-numeric first row.

use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::DenseMatrix;

/// Targets are class indices for classification, reals for regression.
#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    Regression(Vec<f64>),
    Classes { labels: Vec<usize>, n_classes: usize },
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Regression(v) => v.len(),
            Targets::Classes { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DenseMatrix,
    targets: Targets,
}

impl Dataset {
    pub fn new(features: DenseMatrix, targets: Targets) -> Result<Self> {
        if features.rows() == 0 {
            return Err(Error::EmptyBatch);
        }
        if features.rows() != targets.len() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: targets.len(),
            });
        }
        Ok(Dataset { features, targets })
    }

    /// Regression dataset from raw rows.
    pub fn regression(rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let (xs, ys): (Vec<_>, Vec<_>) = rows.iter().cloned().unzip();
        let features = rows_to_matrix(&xs)?;
        Dataset::new(features, Targets::Regression(ys))
    }

    /// Classification dataset from raw rows; class labels in 0..n_classes.
    pub fn classification(rows: &[(Vec<f64>, usize)], n_classes: usize) -> Result<Self> {
        let (xs, labels): (Vec<_>, Vec<_>) = rows.iter().cloned().unzip();
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::Domain(format!(
                "class label {bad} out of range for {n_classes} classes"
            )));
        }
        let features = rows_to_matrix(&xs)?;
        Dataset::new(features, Targets::Classes { labels, n_classes })
    }

    pub fn n_examples(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    pub fn example(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DenseMatrix> {
    if rows.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let cols = rows[0].len();
    let mut data = Vec::with_capacity(rows.len() * cols);
    for row in rows {
        if row.len() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: row.len(),
            });
        }
        data.extend_from_slice(row);
    }
    DenseMatrix::new(rows.len(), cols, data)
}

/// Raw parse of a delimited file: features plus the final target column, not
/// yet typed as regression or classification.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl RawTable {
    pub fn into_regression(self) -> Result<Dataset> {
        let features = rows_to_matrix(&self.features)?;
        Dataset::new(features, Targets::Regression(self.targets))
    }

    /// Targets must be nonnegative integers; n_classes = max label + 1
    /// unless a larger count is given.
    pub fn into_classification(self, n_classes: Option<usize>) -> Result<Dataset> {
        let mut labels = Vec::with_capacity(self.targets.len());
        for &t in &self.targets {
            if t < 0.0 || t.fract() != 0.0 {
                return Err(Error::Domain(format!(
                    "classification target must be a nonnegative integer, got {t}"
                )));
            }
            labels.push(t as usize);
        }
        let max_label = labels.iter().copied().max().unwrap_or(0);
        let n_classes = n_classes.unwrap_or(max_label + 1);
        if max_label >= n_classes {
            return Err(Error::Domain(format!(
                "label {max_label} out of range for {n_classes} classes"
            )));
        }
        let features = rows_to_matrix(&self.features)?;
        Dataset::new(features, Targets::Classes { labels, n_classes })
    }
}

pub fn load_table(path: &Path) -> Result<RawTable> {
    let text = std::fs::read_to_string(path)?;
    parse_table(&text)
}

pub fn parse_table(text: &str) -> Result<RawTable> {
    let mut features = Vec::new();
    let mut targets = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if features.is_empty() && targets.is_empty() => continue, // header row
            Err(e) => {
                return Err(Error::Parse(format!(
                    "line {}: non-numeric field ({e})",
                    lineno + 1
                )))
            }
        };
        if row.len() < 2 {
            return Err(Error::Parse(format!(
                "line {}: need at least one feature and a target",
                lineno + 1
            )));
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse(format!(
                    "line {}: expected {w} fields, got {}",
                    lineno + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        let (xs, target) = row.split_at(row.len() - 1);
        features.push(xs.to_vec());
        targets.push(target[0]);
    }
    if features.is_empty() {
        return Err(Error::EmptyBatch);
    }
    Ok(RawTable { features, targets })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_and_without_header() {
        let with = "x1,x2,y\n1.0,2.0,3.0\n4,5,6\n";
        let t = parse_table(with).unwrap();
        assert_eq!(t.features, vec![vec![1.0, 2.0], vec![4.0, 5.0]]);
        assert_eq!(t.targets, vec![3.0, 6.0]);

        let without = "1.0,2.0,3.0\n";
        let t = parse_table(without).unwrap();
        assert_eq!(t.features.len(), 1);
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(parse_table("1,2,3\n1,2\n").is_err());
    }

    #[test]
    fn classification_target_validation() {
        let t = parse_table("1,0\n2,1\n3,2\n").unwrap();
        let d = t.clone().into_classification(None).unwrap();
        assert_eq!(
            d.targets(),
            &Targets::Classes {
                labels: vec![0, 1, 2],
                n_classes: 3
            }
        );
        let bad = parse_table("1,0.5\n").unwrap();
        assert!(bad.into_classification(None).is_err());
    }
}
