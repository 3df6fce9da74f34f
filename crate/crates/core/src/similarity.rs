//! Feature-similarity matrices.
//!
//! Pearson similarity is `corr + 1`, so weights lie in `[0, 2]`. The four
//! distance measures are turned into similarities by subtracting each
//! pairwise distance from the largest distance between distinct features.
//! Every unordered pair is computed once, in a fixed summation order, and
//! mirrored; results do not depend on the rayon pool size.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DataMatrix;
use crate::error::{FraneError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMeasure {
    Pearson,
    Canberra,
    Chebyshev,
    Manhattan,
    Euclidean,
}

impl SimilarityMeasure {
    pub const ALL: [SimilarityMeasure; 5] = [
        SimilarityMeasure::Pearson,
        SimilarityMeasure::Canberra,
        SimilarityMeasure::Chebyshev,
        SimilarityMeasure::Manhattan,
        SimilarityMeasure::Euclidean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityMeasure::Pearson => "pearson",
            SimilarityMeasure::Canberra => "canberra",
            SimilarityMeasure::Chebyshev => "chebyshev",
            SimilarityMeasure::Manhattan => "manhattan",
            SimilarityMeasure::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for SimilarityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SimilarityMeasure {
    type Err = FraneError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| FraneError::InvalidParameter(format!("unknown similarity '{s}'")))
    }
}

/// Symmetric, non-negative `n x n` weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    weights: Vec<f64>,
    n: usize,
    measure: SimilarityMeasure,
}

impl SimilarityMatrix {
    /// Wraps a row-major matrix after checking symmetry, finiteness and sign.
    pub fn from_weights(weights: Vec<f64>, n: usize, measure: SimilarityMeasure) -> Result<Self> {
        if weights.len() != n * n {
            return Err(FraneError::Shape(format!("{} weights for n = {n}", weights.len())));
        }
        for j in 0..n {
            for k in 0..n {
                let w = weights[j * n + k];
                if !w.is_finite() || w < 0.0 {
                    return Err(FraneError::InvalidParameter(format!(
                        "weight ({j}, {k}) = {w} is not a finite non-negative number"
                    )));
                }
                if w != weights[k * n + j] {
                    return Err(FraneError::InvalidParameter(format!(
                        "weights ({j}, {k}) and ({k}, {j}) differ"
                    )));
                }
            }
        }
        Ok(Self {
            weights,
            n,
            measure,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measure(&self) -> SimilarityMeasure {
        self.measure
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.weights[j * self.n + k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Writes a text cache: a header line `frane-similarity <measure> <n>`
    /// followed by `n` comma-separated rows.
    pub fn write_cache<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| FraneError::io("<similarity cache>", e);
        writeln!(out, "frane-similarity {} {}", self.measure, self.n).map_err(io)?;
        for j in 0..self.n {
            let row = &self.weights[j * self.n..(j + 1) * self.n];
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(out, "{}", line.join(",")).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_cache<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let io = |e| FraneError::io("<similarity cache>", e);
        let header = lines
            .next()
            .ok_or_else(|| FraneError::BadCache("empty file".into()))?
            .map_err(io)?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (measure, n) = match parts.as_slice() {
            ["frane-similarity", measure, n] => (
                measure.parse::<SimilarityMeasure>()?,
                n.parse::<usize>()
                    .map_err(|_| FraneError::BadCache(format!("bad size '{n}'")))?,
            ),
            _ => return Err(FraneError::BadCache(format!("bad header '{header}'"))),
        };
        let mut weights = Vec::with_capacity(n * n);
        for (j, line) in lines.enumerate() {
            let line = line.map_err(io)?;
            if line.trim().is_empty() {
                continue;
            }
            if j >= n {
                return Err(FraneError::BadCache("more rows than declared".into()));
            }
            for cell in line.split(',') {
                let v = cell
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| FraneError::BadCache(format!("row {j}: bad value '{cell}'")))?;
                weights.push(v);
            }
        }
        if weights.len() != n * n {
            return Err(FraneError::BadCache(format!(
                "expected {} values, found {}",
                n * n,
                weights.len()
            )));
        }
        Self::from_weights(weights, n, measure)
    }
}

/// Summary of the off-diagonal weights `{w[j][k] : j < k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffDiagStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Ascending, one entry per unordered pair.
    pub sorted: Vec<f64>,
}

pub fn offdiag_stats(w: &SimilarityMatrix) -> Result<OffDiagStats> {
    let n = w.n();
    if n < 2 {
        return Err(FraneError::InvalidParameter(
            "off-diagonal statistics need n >= 2".into(),
        ));
    }
    let mut sorted = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n {
        for k in j + 1..n {
            sorted.push(w.get(j, k));
        }
    }
    Ok(stats_from_values(sorted))
}

/// Same statistics over an arbitrary multiset of weights.
pub fn stats_from_values(mut values: Vec<f64>) -> OffDiagStats {
    assert!(!values.is_empty(), "statistics over an empty weight set");
    values.sort_by(f64::total_cmp);
    let len = values.len();
    let mean = values.iter().sum::<f64>() / len as f64;
    let median = if len % 2 == 1 {
        values[len / 2]
    } else {
        0.5 * (values[len / 2 - 1] + values[len / 2])
    };
    OffDiagStats {
        min: values[0],
        max: values[len - 1],
        mean,
        median,
        sorted: values,
    }
}

pub fn compute_similarity(data: &DataMatrix, measure: SimilarityMeasure) -> SimilarityMatrix {
    match measure {
        SimilarityMeasure::Pearson => pearson_similarity(data),
        other => distance_similarity(data, other),
    }
}

/// Dot product with four interleaved accumulators, combined in fixed order.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in chunks * 4..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Fills the upper triangle in parallel (one task per row) and mirrors it.
fn pairwise<F>(n: usize, diagonal: impl Fn(usize) -> f64, pair: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| (j + 1..n).map(|k| pair(j, k)).collect())
        .collect();
    let mut weights = vec![0.0; n * n];
    for (j, row) in upper.iter().enumerate() {
        weights[j * n + j] = diagonal(j);
        for (offset, &v) in row.iter().enumerate() {
            let k = j + 1 + offset;
            weights[j * n + k] = v;
            weights[k * n + j] = v;
        }
    }
    weights
}

/// `w[j][k] = corr(f_j, f_k) + 1`. A constant feature has correlation 0
/// with everything, itself included.
pub fn pearson_similarity(data: &DataMatrix) -> SimilarityMatrix {
    let n = data.n();
    let m = data.m() as f64;
    let mut centered = data.columns();
    let mut norms = Vec::with_capacity(n);
    let mut constant = Vec::with_capacity(n);
    for col in centered.iter_mut() {
        let first = col[0];
        constant.push(col.iter().all(|&v| v == first));
        let mean = col.iter().sum::<f64>() / m;
        col.iter_mut().for_each(|v| *v -= mean);
        norms.push(dot(col, col).sqrt());
    }
    let corr = |j: usize, k: usize| -> f64 {
        if constant[j] || constant[k] || norms[j] == 0.0 || norms[k] == 0.0 {
            return 0.0;
        }
        (dot(&centered[j], &centered[k]) / (norms[j] * norms[k])).clamp(-1.0, 1.0)
    };
    let weights = pairwise(
        n,
        |j| if constant[j] || norms[j] == 0.0 { 1.0 } else { 2.0 },
        |j, k| corr(j, k) + 1.0,
    );
    SimilarityMatrix {
        weights,
        n,
        measure: SimilarityMeasure::Pearson,
    }
}

/// Distance between two feature vectors under a non-Pearson measure.
pub fn feature_distance(a: &[f64], b: &[f64], measure: SimilarityMeasure) -> f64 {
    match measure {
        SimilarityMeasure::Canberra => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let denom = x.abs() + y.abs();
                if denom == 0.0 {
                    0.0
                } else {
                    (y - x).abs() / denom
                }
            })
            .sum(),
        SimilarityMeasure::Chebyshev => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (y - x).abs())
            .fold(0.0, f64::max),
        SimilarityMeasure::Manhattan => a.iter().zip(b).map(|(&x, &y)| (y - x).abs()).sum(),
        SimilarityMeasure::Euclidean => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (y - x) * (y - x))
            .sum::<f64>()
            .sqrt(),
        SimilarityMeasure::Pearson => panic!("pearson is not a distance measure"),
    }
}

/// `w[j][k] = M' - d(f_j, f_k)` where `M'` is the largest distance between
/// distinct features. The diagonal is `M'`.
///
/// # Panics
/// If `measure` is [`SimilarityMeasure::Pearson`].
pub fn distance_similarity(data: &DataMatrix, measure: SimilarityMeasure) -> SimilarityMatrix {
    assert_ne!(measure, SimilarityMeasure::Pearson, "use pearson_similarity");
    let n = data.n();
    let cols = data.columns();
    let distances = pairwise(n, |_| 0.0, |j, k| feature_distance(&cols[j], &cols[k], measure));
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let weights = distances.iter().map(|&d| max_distance - d).collect();
    SimilarityMatrix {
        weights,
        n,
        measure,
    }
}
