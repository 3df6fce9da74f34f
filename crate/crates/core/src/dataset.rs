//! Tabular data model, CSV ingestion and cross-validation folds.
//!
//! A [`DataMatrix`] is a dense, row-major table of finite reals with one
//! name per column. Rows are examples and columns are the features that
//! get ranked. Fold assignment shuffles row indices with a ChaCha8 stream
//! seeded from a 64-bit seed, so splits replicate across machines.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FraneError, Result};

/// Smallest feature count the ranking pipeline accepts.
pub const MIN_FEATURES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    feature_names: Vec<String>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values, checking every invariant.
    pub fn new(values: Vec<f64>, rows: usize, feature_names: Vec<String>) -> Result<Self> {
        let cols = feature_names.len();
        if rows == 0 {
            return Err(FraneError::NoRows);
        }
        if cols < MIN_FEATURES {
            return Err(FraneError::TooFewFeatures(cols));
        }
        if values.len() != rows * cols {
            return Err(FraneError::Shape(format!(
                "{} values for {rows}x{cols}",
                values.len()
            )));
        }
        let mut seen = HashSet::with_capacity(cols);
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(FraneError::DuplicateColumn(name.clone()));
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(FraneError::BadCell {
                row: pos / cols + 1,
                column: feature_names[pos % cols].clone(),
                value: values[pos].to_string(),
            });
        }
        Ok(Self {
            values,
            rows,
            cols,
            feature_names,
        })
    }

    /// Convenience constructor with generated names `f0, f1, ...`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(FraneError::Shape("rows of unequal length".into()));
        }
        let names = (0..n).map(|j| format!("f{j}")).collect();
        Self::new(rows.concat(), m, names)
    }

    /// Number of examples (rows).
    pub fn m(&self) -> usize {
        self.rows
    }

    /// Number of features (columns).
    pub fn n(&self) -> usize {
        self.cols
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Row-major backing storage.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    /// Column-major copy, one contiguous vector per feature.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// New matrix holding the given rows, in the order given.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(FraneError::NoRows);
        }
        let mut values = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            if i >= self.rows {
                return Err(FraneError::Shape(format!("row {i} out of range")));
            }
            values.extend_from_slice(self.row(i));
        }
        Ok(Self {
            values,
            rows: rows.len(),
            cols: self.cols,
            feature_names: self.feature_names.clone(),
        })
    }

    /// New matrix holding the given columns in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&bad) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(FraneError::Shape(format!("column {bad} out of range")));
        }
        let mut values = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let row = self.row(i);
            values.extend(cols.iter().map(|&j| row[j]));
        }
        let names = cols.iter().map(|&j| self.feature_names[j].clone()).collect();
        Self::new(values, self.rows, names)
    }

    /// Per-feature population standard deviation (divisor m).
    pub fn column_std(&self) -> Vec<f64> {
        let m = self.rows as f64;
        (0..self.cols)
            .map(|j| {
                let mean = (0..self.rows).map(|i| self.get(i, j)).sum::<f64>() / m;
                let var = (0..self.rows)
                    .map(|i| {
                        let d = self.get(i, j) - mean;
                        d * d
                    })
                    .sum::<f64>()
                    / m;
                var.sqrt()
            })
            .collect()
    }

    /// Writes the matrix as CSV with a header row. Values use the shortest
    /// representation that parses back to the same bits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.feature_names)?;
        for i in 0..self.rows {
            writer.write_record(self.row(i).iter().map(|v| v.to_string()))?;
        }
        writer.flush().map_err(|e| FraneError::io("<csv output>", e))?;
        Ok(())
    }
}

/// Reads a comma-separated file with a header row, dropping `ignore_columns`.
pub fn load_csv(path: impl AsRef<Path>, ignore_columns: &[String]) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| FraneError::io(path, e))?;
    read_csv(file, ignore_columns)
}

pub fn read_csv<R: Read>(input: R, ignore_columns: &[String]) -> Result<DataMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut seen = HashSet::with_capacity(header.len());
    for name in &header {
        if !seen.insert(name.as_str()) {
            return Err(FraneError::DuplicateColumn(name.clone()));
        }
    }
    for ignored in ignore_columns {
        if !seen.contains(ignored.as_str()) {
            return Err(FraneError::UnknownColumn(ignored.clone()));
        }
    }

    let keep: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, name)| !ignore_columns.contains(name))
        .map(|(j, _)| j)
        .collect();
    if keep.len() < MIN_FEATURES {
        return Err(FraneError::TooFewFeatures(keep.len()));
    }
    let names: Vec<String> = keep.iter().map(|&j| header[j].clone()).collect();

    let mut values = Vec::new();
    let mut rows = 0usize;
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(FraneError::RaggedRow {
                row: r + 1,
                expected: header.len(),
                found: record.len(),
            });
        }
        for &j in &keep {
            let cell = &record[j];
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(FraneError::BadCell {
                        row: r + 1,
                        column: header[j].clone(),
                        value: cell.to_owned(),
                    })
                }
            }
        }
        rows += 1;
    }
    DataMatrix::new(values, rows, names)
}

/// Assignment of every row to one cross-validation fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    fold_count: usize,
    assignments: Vec<usize>,
    seed: u64,
}

impl FoldSplit {
    pub fn fold_count(&self) -> usize {
        self.fold_count
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Row indices of `fold`, ascending.
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        self.rows_where(|f| f == fold)
    }

    /// Row indices outside `fold`, ascending.
    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        self.rows_where(|f| f != fold)
    }

    fn rows_where(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| pred(f))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Shuffles `0..m` with a seeded ChaCha8 generator and deals the shuffled
/// rows round-robin into `fold_count` folds.
pub fn split_folds(m: usize, fold_count: usize, seed: u64) -> Result<FoldSplit> {
    if fold_count < 2 || m < fold_count {
        return Err(FraneError::InvalidFolds {
            rows: m,
            folds: fold_count,
        });
    }
    let mut order: Vec<usize> = (0..m).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut assignments = vec![0; m];
    for (pos, &row) in order.iter().enumerate() {
        assignments[row] = pos % fold_count;
    }
    Ok(FoldSplit {
        fold_count,
        assignments,
        seed,
    })
}

/// Splits `data` into (train, test) for one fold, preserving row order.
pub fn take_fold(
    data: &DataMatrix,
    split: &FoldSplit,
    fold: usize,
) -> Result<(DataMatrix, DataMatrix)> {
    if fold >= split.fold_count {
        return Err(FraneError::FoldOutOfRange {
            fold,
            count: split.fold_count,
        });
    }
    if split.assignments.len() != data.m() {
        return Err(FraneError::Shape(format!(
            "fold split covers {} rows, data has {}",
            split.assignments.len(),
            data.m()
        )));
    }
    let train = data.select_rows(&split.train_rows(fold))?;
    let test = data.select_rows(&split.test_rows(fold))?;
    Ok((train, test))
}
