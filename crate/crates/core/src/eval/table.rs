use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use super::auc::midranks;
use crate::error::{Error, Result};

/// Marker written for a missing cell.
pub const MISSING: &str = "NA";

/// AUC per (dataset, method). Rows and columns keep insertion order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreTable {
    pub methods: Vec<String>,
    pub rows: Vec<ScoreRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRow {
    pub dataset: String,
    pub cells: Vec<Option<f64>>,
}

impl ScoreTable {
    pub fn new(methods: Vec<String>) -> Self {
        Self {
            methods,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, dataset: impl Into<String>, cells: Vec<Option<f64>>) -> Result<()> {
        if cells.len() != self.methods.len() {
            return Err(Error::LengthMismatch(self.methods.len(), cells.len()));
        }
        self.rows.push(ScoreRow {
            dataset: dataset.into(),
            cells,
        });
        Ok(())
    }

    pub fn column_index(&self, method: &str) -> Result<usize> {
        self.methods
            .iter()
            .position(|m| m == method)
            .ok_or_else(|| Error::InvalidConfig(format!("no column `{method}` in score table")))
    }

    /// Values of one column; `None` cells stay `None`.
    pub fn column(&self, method: &str) -> Result<Vec<Option<f64>>> {
        let j = self.column_index(method)?;
        Ok(self.rows.iter().map(|r| r.cells[j]).collect())
    }

    /// Keeps only `methods` and drops rows where any of them is missing.
    /// Returns the reduced table and the names of the dropped datasets.
    pub fn complete_rows(&self, methods: &[&str]) -> Result<(ScoreTable, Vec<String>)> {
        let idx: Vec<usize> = methods
            .iter()
            .map(|m| self.column_index(m))
            .collect::<Result<_>>()?;
        let mut out = ScoreTable::new(methods.iter().map(|m| m.to_string()).collect());
        let mut dropped = Vec::new();
        for row in &self.rows {
            let cells: Vec<Option<f64>> = idx.iter().map(|&j| row.cells[j]).collect();
            if cells.iter().all(Option::is_some) {
                out.rows.push(ScoreRow {
                    dataset: row.dataset.clone(),
                    cells,
                });
            } else {
                dropped.push(row.dataset.clone());
            }
        }
        Ok((out, dropped))
    }

    /// CSV with a `dataset` column then one column per method, 6 decimals.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        let mut header = vec!["dataset".to_string()];
        header.extend(self.methods.iter().cloned());
        wtr.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![row.dataset.clone()];
            rec.extend(row.cells.iter().map(|c| match c {
                Some(v) => format!("{v:.6}"),
                None => MISSING.to_string(),
            }));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
        if header.first().map(String::as_str) != Some("dataset") {
            return Err(Error::InvalidConfig(format!(
                "{}: first column must be `dataset`",
                path.display()
            )));
        }
        let mut table = ScoreTable::new(header[1..].to_vec());
        for record in rdr.records() {
            let record = record?;
            let cells = (1..header.len())
                .map(|j| {
                    let cell = record.get(j).unwrap_or("");
                    if cell.is_empty() || cell == MISSING {
                        Ok(None)
                    } else {
                        cell.parse::<f64>()
                            .map(Some)
                            .map_err(|_| Error::InvalidConfig(format!("bad score `{cell}`")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(record.get(0).unwrap_or(""), cells)?;
        }
        Ok(table)
    }
}

/// Mean rank of every method across datasets (rank 1 = highest AUC, ties
/// share midranks).
pub fn average_rank(table: &ScoreTable) -> Result<BTreeMap<String, f64>> {
    if table.rows.is_empty() {
        return Err(Error::Empty("score table has no rows".into()));
    }
    let k = table.methods.len();
    let mut sums = vec![0.0; k];
    for row in &table.rows {
        let values: Vec<f64> = row
            .cells
            .iter()
            .enumerate()
            .map(|(j, c)| {
                c.ok_or_else(|| {
                    Error::MissingCells(format!("{} / {}", row.dataset, table.methods[j]))
                })
            })
            .collect::<Result<_>>()?;
        // descending order: rank the negated scores
        let neg: Vec<f64> = values.iter().map(|v| -v).collect();
        for (s, r) in sums.iter_mut().zip(midranks(&neg)) {
            *s += r;
        }
    }
    let n = table.rows.len() as f64;
    Ok(table
        .methods
        .iter()
        .cloned()
        .zip(sums.into_iter().map(|s| s / n))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(rows: &[&[f64]]) -> ScoreTable {
        let k = rows[0].len();
        let mut t = ScoreTable::new((0..k).map(|j| format!("m{j}")).collect());
        for (i, r) in rows.iter().enumerate() {
            t.push_row(format!("d{i}"), r.iter().map(|&v| Some(v)).collect())
                .unwrap();
        }
        t
    }

    #[test]
    fn dominating_and_identical_methods() {
        let t = table(&[&[0.9, 0.5, 0.5], &[0.8, 0.3, 0.3]]);
        let r = average_rank(&t).unwrap();
        assert_eq!(r["m0"], 1.0);
        assert_eq!(r["m1"], 2.5);
        assert_eq!(r["m2"], 2.5);
    }

    #[test]
    fn matches_hand_ranking() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                (0..5)
                    .map(|_| rng.random_range(0..6) as f64 / 5.0)
                    .collect()
            })
            .collect();
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let r = average_rank(&table(&refs)).unwrap();
        for j in 0..5 {
            let mut total = 0.0;
            for row in &rows {
                let better = row.iter().filter(|&&v| v > row[j]).count() as f64;
                let equal = row.iter().filter(|&&v| v == row[j]).count() as f64;
                total += better + (equal + 1.0) / 2.0;
            }
            assert!((r[&format!("m{j}")] - total / 10.0).abs() < 1e-12);
            assert!((1.0..=5.0).contains(&r[&format!("m{j}")]));
        }
    }

    #[test]
    fn missing_cells() {
        let mut t = table(&[&[0.9, 0.5]]);
        t.push_row("d1", vec![Some(0.4), None]).unwrap();
        assert!(matches!(average_rank(&t), Err(Error::MissingCells(_))));
        let (kept, dropped) = t.complete_rows(&["m0", "m1"]).unwrap();
        assert_eq!(kept.rows.len(), 1);
        assert_eq!(dropped, vec!["d1".to_string()]);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scores.csv");
        let mut t = ScoreTable::new(vec!["LOTUS".into(), "knn".into()]);
        t.push_row("19_landsat", vec![Some(0.7902), None]).unwrap();
        t.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "dataset,LOTUS,knn\n19_landsat,0.790200,NA\n");
        assert_eq!(ScoreTable::read_csv(&path).unwrap(), t);
    }
}
