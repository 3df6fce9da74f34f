//! Cross-validated reconstruction benchmark for feature rankings.
//!
//! For every fold the ranking is computed on the training rows, the top
//! `n'` features are kept, and a k-nearest-neighbour model working in that
//! subspace predicts every feature of the test rows. The error is the mean
//! absolute residual scaled by each feature's training standard deviation.

use std::io::Write;

use rayon::prelude::*;

use crate::dataset::{split_folds, take_fold, DataMatrix};
use crate::error::{FraneError, Result};
use crate::ranking::FeatureRanking;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub folds: usize,
    pub k_neighbors: usize,
    pub n_prime_list: Vec<usize>,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            k_neighbors: 5,
            n_prime_list: vec![16],
            seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.folds < 2 {
            return Err(FraneError::InvalidParameter(format!("need at least 2 folds, got {}", self.folds)));
        }
        if self.k_neighbors == 0 {
            return Err(FraneError::InvalidParameter("k must be at least 1".into()));
        }
        if self.n_prime_list.is_empty() {
            return Err(FraneError::InvalidParameter("n' list is empty".into()));
        }
        if let Some(&bad) = self.n_prime_list.iter().find(|&&p| p == 0 || p > n) {
            return Err(FraneError::InvalidParameter(format!(
                "n' = {bad} outside [1, {n}]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_prime_list: Vec<usize>,
    /// `folds x n_prime_list.len()`.
    pub per_fold_rmae: Vec<Vec<f64>>,
    pub mean_rmae: Vec<f64>,
    /// Zero-variance training features left out of each fold's average.
    pub excluded_features: Vec<usize>,
}

impl EvalReport {
    /// `(fold label, n', rmae)` rows: all folds first, then one `mean` row per `n'`.
    pub fn rows(&self) -> Vec<(String, usize, f64)> {
        let mut rows = Vec::new();
        for (fold, values) in self.per_fold_rmae.iter().enumerate() {
            for (&p, &v) in self.n_prime_list.iter().zip(values) {
                rows.push((fold.to_string(), p, v));
            }
        }
        for (&p, &v) in self.n_prime_list.iter().zip(&self.mean_rmae) {
            rows.push(("mean".to_string(), p, v));
        }
        rows
    }

    /// `(n', mean RMAE)` pairs in configured order.
    pub fn curve(&self) -> Vec<(usize, f64)> {
        self.n_prime_list.iter().copied().zip(self.mean_rmae.iter().copied()).collect()
    }

    /// CSV with columns `fold,n_prime,rmae`; the summary rows use fold `mean`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["fold", "n_prime", "rmae"])?;
        for (fold, p, v) in self.rows() {
            writer.write_record([fold, p.to_string(), v.to_string()])?;
        }
        writer.flush().map_err(|e| FraneError::io("<report output>", e))?;
        Ok(())
    }
}

/// Predicts every feature of every test row as the mean of its `k` nearest
/// training rows, measured by Euclidean distance over `selected` columns.
/// Distance ties go to the lower training row. Returns an `m_test x n`
/// row-major matrix.
pub fn knn_reconstruct(
    train: &DataMatrix,
    test: &DataMatrix,
    selected: &[usize],
    k: usize,
) -> Result<Vec<f64>> {
    if selected.is_empty() {
        return Err(FraneError::InvalidParameter("no features selected".into()));
    }
    if k == 0 {
        return Err(FraneError::InvalidParameter("k must be at least 1".into()));
    }
    let n = train.n();
    if test.n() != n {
        return Err(FraneError::Shape(format!("train has {n} features, test has {}", test.n())));
    }
    if let Some(&bad) = selected.iter().find(|&&j| j >= n) {
        return Err(FraneError::Shape(format!("selected feature {bad} out of range")));
    }
    let k = k.min(train.m());

    let mut predictions = Vec::with_capacity(test.m() * n);
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(train.m());
    for t in 0..test.m() {
        let query = test.row(t);
        dist.clear();
        dist.extend((0..train.m()).map(|r| {
            let row = train.row(r);
            let d: f64 = selected
                .iter()
                .map(|&j| {
                    let diff = row[j] - query[j];
                    diff * diff
                })
                .sum();
            (d, r)
        }));
        let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < dist.len() {
            dist.select_nth_unstable_by(k - 1, by_distance);
            dist.truncate(k);
        }
        dist.sort_by(by_distance);

        let start = predictions.len();
        predictions.resize(start + n, 0.0);
        let out = &mut predictions[start..];
        for &(_, r) in dist.iter() {
            for (o, &v) in out.iter_mut().zip(train.row(r)) {
                *o += v;
            }
        }
        let kf = k as f64;
        out.iter_mut().for_each(|v| *v /= kf);
    }
    Ok(predictions)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmaeScore {
    pub value: f64,
    /// Features skipped because their standard deviation is zero.
    pub excluded: usize,
}

/// Mean over features (with `sigma > 0`) of the mean absolute residual
/// divided by that feature's `sigma`.
pub fn rmae(predicted: &[f64], actual: &DataMatrix, sigma: &[f64]) -> Result<RmaeScore> {
    let n = actual.n();
    let m = actual.m();
    if predicted.len() != m * n || sigma.len() != n {
        return Err(FraneError::Shape(format!(
            "predictions {} / sigma {} do not match {m}x{n}",
            predicted.len(),
            sigma.len()
        )));
    }
    let mut per_feature = vec![0.0; n];
    for i in 0..m {
        let truth = actual.row(i);
        let guess = &predicted[i * n..(i + 1) * n];
        for j in 0..n {
            per_feature[j] += (guess[j] - truth[j]).abs();
        }
    }
    let mut total = 0.0;
    let mut used = 0usize;
    for j in 0..n {
        if sigma[j] > 0.0 {
            total += per_feature[j] / m as f64 / sigma[j];
            used += 1;
        }
    }
    if used == 0 {
        return Err(FraneError::AllZeroVariance);
    }
    Ok(RmaeScore {
        value: total / used as f64,
        excluded: n - used,
    })
}

/// `1, 2, 4, ..., 2^k` with `2^k <= n`, followed by `n` if it is not a power of two.
pub fn error_curve_points(n: usize) -> Vec<usize> {
    let mut points = Vec::new();
    let mut p = 1usize;
    while p <= n {
        points.push(p);
        match p.checked_mul(2) {
            Some(next) => p = next,
            None => break,
        }
    }
    if points.last() != Some(&n) && n > 0 {
        points.push(n);
    }
    points
}

/// Runs the cross-validated benchmark. Folds are evaluated in parallel;
/// each fold writes only its own row, so the report is deterministic.
pub fn evaluate_ranking<F>(data: &DataMatrix, ranker: F, config: &EvalConfig) -> Result<EvalReport>
where
    F: Fn(&DataMatrix) -> Result<FeatureRanking> + Sync,
{
    config.validate(data.n())?;
    let split = split_folds(data.m(), config.folds, config.seed)?;

    let per_fold: Vec<(Vec<f64>, usize)> = (0..config.folds)
        .into_par_iter()
        .map(|fold| -> Result<(Vec<f64>, usize)> {
            let (train, test) = take_fold(data, &split, fold)?;
            let ranking = ranker(&train)?;
            if ranking.order.len() != data.n() {
                return Err(FraneError::Shape(format!(
                    "ranker returned {} features for {}",
                    ranking.order.len(),
                    data.n()
                )));
            }
            let sigma = train.column_std();
            let mut row = Vec::with_capacity(config.n_prime_list.len());
            let mut excluded = 0;
            for &p in &config.n_prime_list {
                let predicted = knn_reconstruct(&train, &test, ranking.top(p), config.k_neighbors)?;
                let score = rmae(&predicted, &test, &sigma)?;
                excluded = score.excluded;
                row.push(score.value);
            }
            Ok((row, excluded))
        })
        .collect::<Result<_>>()?;

    let columns = config.n_prime_list.len();
    let mean_rmae = (0..columns)
        .map(|c| per_fold.iter().map(|(row, _)| row[c]).sum::<f64>() / config.folds as f64)
        .collect();
    let (per_fold_rmae, excluded_features) = per_fold.into_iter().unzip();
    Ok(EvalReport {
        n_prime_list: config.n_prime_list.clone(),
        per_fold_rmae,
        mean_rmae,
        excluded_features,
    })
}
