use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default name of the label column in CSV input.
pub const LABEL_COLUMN: &str = "label";

/// A tabular dataset: numeric features plus optional 0/1 outlier labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    features: Array2<f64>,
    labels: Option<Vec<u8>>,
}

/// What CSV ingestion had to repair.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    /// Cells that were empty, non-numeric or NaN and got the column mean.
    pub imputed_cells: usize,
    /// Columns with no numeric value at all; these are dropped.
    pub dropped_columns: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Array2<f64>,
        labels: Option<Vec<u8>>,
    ) -> Result<Self> {
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure("features must be finite".into()));
        }
        if let Some(y) = &labels {
            if y.len() != features.nrows() {
                return Err(Error::LengthMismatch(features.nrows(), y.len()));
            }
            if y.iter().any(|&v| v > 1) {
                return Err(Error::InvalidConfig("labels must be 0 or 1".into()));
            }
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
        })
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.labels.as_deref()
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn without_labels(&self) -> Self {
        Self {
            name: self.name.clone(),
            features: self.features.clone(),
            labels: None,
        }
    }

    /// Reads a CSV with a header row. `label_col`, if present in the
    /// header, becomes the label vector; every other column is a feature.
    pub fn from_csv(path: &Path, label_col: Option<&str>) -> Result<(Self, IngestReport)> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::from_reader(name, file, label_col)
    }

    pub fn from_reader<R: std::io::Read>(
        name: impl Into<String>,
        reader: R,
        label_col: Option<&str>,
    ) -> Result<(Self, IngestReport)> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        let label_idx = label_col.and_then(|l| header.iter().position(|h| h == l));

        let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); header.len()];
        let mut labels = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            for (j, col) in columns.iter_mut().enumerate() {
                let cell = record.get(j).unwrap_or("");
                if Some(j) == label_idx {
                    labels.push(parse_label(cell).ok_or_else(|| {
                        Error::InvalidConfig(format!("row {}: label {cell:?} is not 0/1", row + 1))
                    })?);
                } else {
                    col.push(cell.parse::<f64>().ok().filter(|v| v.is_finite()));
                }
            }
        }

        let mut report = IngestReport::default();
        let mut kept = Vec::new();
        for (j, col) in columns.into_iter().enumerate() {
            if Some(j) == label_idx {
                continue;
            }
            let present: Vec<f64> = col.iter().flatten().copied().collect();
            if present.is_empty() {
                report.dropped_columns.push(header[j].clone());
                continue;
            }
            let mean = present.iter().sum::<f64>() / present.len() as f64;
            report.imputed_cells += col.len() - present.len();
            kept.push(
                col.into_iter()
                    .map(|v| v.unwrap_or(mean))
                    .collect::<Vec<_>>(),
            );
        }
        let n = kept.first().map_or(labels.len(), Vec::len);
        if n == 0 || kept.is_empty() {
            return Err(Error::Empty(
                "dataset has no rows or no numeric columns".into(),
            ));
        }
        let features = Array2::from_shape_fn((n, kept.len()), |(i, j)| kept[j][i]);
        let labels = label_idx.map(|_| labels);
        Ok((Self::new(name, features, labels)?, report))
    }

    /// Writes features (and labels as a trailing `label` column) with
    /// shortest round-trip float formatting.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::InvalidConfig(format!("{other:?}")),
        })?;
        let mut header: Vec<String> = (0..self.n_features()).map(|j| format!("x{j}")).collect();
        if self.labels.is_some() {
            header.push(LABEL_COLUMN.into());
        }
        wtr.write_record(&header)?;
        for (i, row) in self.features.outer_iter().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            if let Some(y) = &self.labels {
                rec.push(y[i].to_string());
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io(path, e))
    }
}

fn parse_label(cell: &str) -> Option<u8> {
    match cell.parse::<f64>().ok()? {
        v if v == 0.0 => Some(0),
        v if v == 1.0 => Some(1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imputes_and_drops() {
        let csv = "a,b,c,label\n1,x,q,0\n3,2,r,1\nNaN,4,s,0\n";
        let (ds, report) = Dataset::from_reader("t", csv.as_bytes(), Some("label")).unwrap();
        assert_eq!(ds.features().dim(), (3, 2));
        assert_eq!(ds.features()[[2, 0]], 2.0);
        assert_eq!(ds.features()[[0, 1]], 3.0);
        assert_eq!(report.imputed_cells, 2);
        assert_eq!(report.dropped_columns, vec!["c".to_string()]);
        assert_eq!(ds.labels(), Some(&[0u8, 1, 0][..]));
    }

    #[test]
    fn bad_label_is_an_error() {
        let csv = "a,label\n1,2\n";
        assert!(Dataset::from_reader("t", csv.as_bytes(), Some("label")).is_err());
    }

    #[test]
    fn missing_label_column_means_unlabeled() {
        let csv = "a,b\n1,2\n3,4\n";
        let (ds, _) = Dataset::from_reader("t", csv.as_bytes(), Some("label")).unwrap();
        assert!(ds.labels().is_none());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let x = Array2::from_shape_fn((4, 3), |(i, j)| {
            (i as f64 + 0.1).powf(j as f64 + 0.37) / 3.0
        });
        let ds = Dataset::new("d", x, Some(vec![0, 1, 0, 0])).unwrap();
        ds.to_csv(&path).unwrap();
        let (back, _) = Dataset::from_csv(&path, Some(LABEL_COLUMN)).unwrap();
        assert_eq!(back.features(), ds.features());
        assert_eq!(back.labels(), ds.labels());
    }
}
